use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::linalg::{C64, CMat};
use crate::rng::GaussianSource;

/// One OFDM symbol period across all transmit antennas.
///
/// Rows index subcarriers (for `freq_symbols`) or time samples (for
/// `time_samples`); columns index antennas. Samples are 0-based: the first
/// `n_cp` rows of `time_samples` are the cyclic prefix.
#[derive(Clone, Debug, PartialEq)]
pub struct OfdmFrame {
    pub freq_symbols: CMat,
    pub time_samples: CMat,
    pub n_cp: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReceivedSignal {
    /// Time samples, one column per receive antenna.
    pub samples: CMat,
    pub noise_free: bool,
}

fn transform_columns(m: &CMat, inverse: bool) -> CMat {
    let n = m.nrows();
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let mut out = m.clone();
    for mut col in out.column_iter_mut() {
        let mut buf: Vec<C64> = col.iter().copied().collect();
        fft.process(&mut buf);
        for (dst, src) in col.iter_mut().zip(buf) {
            *dst = src;
        }
    }
    out
}

/// Builds the time-domain frame `x(n) = (1/N) sum_k X(k) e^{j 2 pi n k / N}`
/// and prepends the last `n_cp` samples as cyclic prefix.
pub fn modulate_frame(freq_symbols: &CMat, n_cp: usize) -> Result<OfdmFrame> {
    let n = freq_symbols.nrows();
    if n == 0 || freq_symbols.ncols() == 0 {
        return Err(Error::dim("empty frequency-domain symbol block"));
    }
    if n_cp > n {
        return Err(Error::dim(format!("cyclic prefix {n_cp} longer than the {n}-point IDFT")));
    }
    let body = transform_columns(freq_symbols, true) / C64::new(n as f64, 0.0);
    let mut time_samples = CMat::zeros(n + n_cp, freq_symbols.ncols());
    time_samples.rows_mut(0, n_cp).copy_from(&body.rows(n - n_cp, n_cp));
    time_samples.rows_mut(n_cp, n).copy_from(&body);
    Ok(OfdmFrame { freq_symbols: freq_symbols.clone(), time_samples, n_cp })
}

/// Strips the cyclic prefix and takes the unnormalized DFT of each column.
pub fn demodulate(samples: &CMat, n_sc: usize, n_cp: usize) -> Result<CMat> {
    if samples.nrows() != n_sc + n_cp {
        return Err(Error::dim(format!(
            "expected {} samples per frame, got {}",
            n_sc + n_cp,
            samples.nrows()
        )));
    }
    Ok(transform_columns(&samples.rows(n_cp, n_sc).into_owned(), false))
}

fn convolve(samples: &CMat, taps: &[CMat]) -> Result<CMat> {
    let n_tx = samples.ncols();
    let n_rx = taps.first().map(|t| t.nrows()).unwrap_or(0);
    if taps.iter().any(|t| t.ncols() != n_tx || t.nrows() != n_rx) {
        return Err(Error::dim("tap matrices must be n_rx x n_tx matching the frame"));
    }
    let len = samples.nrows();
    let mut out = CMat::zeros(len, n_rx);
    for n in 0..len {
        for (l, tap) in taps.iter().enumerate().take(n + 1) {
            let x = samples.row(n - l).transpose();
            let y = tap * x;
            for r in 0..n_rx {
                out[(n, r)] += y[r];
            }
        }
    }
    Ok(out)
}

fn add_noise(samples: &mut CMat, noise: Option<(f64, &mut GaussianSource)>) -> bool {
    match noise {
        Some((var, rng)) if var > 0.0 => {
            for i in 0..samples.nrows() {
                for j in 0..samples.ncols() {
                    samples[(i, j)] += rng.complex_normal(var);
                }
            }
            false
        }
        _ => true,
    }
}

/// Passes one isolated frame through the multipath channel `h(l)`.
///
/// Each receive antenna sees `sum_i h_{s,i}(n) * g_i(n)` (linear convolution)
/// plus optional complex Gaussian noise. The tap count may not exceed
/// `n_cp + 1`, otherwise the prefix cannot absorb the channel memory.
pub fn propagate_time(
    frame: &OfdmFrame,
    taps: &[CMat],
    noise: Option<(f64, &mut GaussianSource)>,
) -> Result<ReceivedSignal> {
    propagate_stream(std::slice::from_ref(frame), taps, noise)
}

/// Same as [`propagate_time`] for frames transmitted back to back.
pub fn propagate_stream(
    frames: &[OfdmFrame],
    taps: &[CMat],
    noise: Option<(f64, &mut GaussianSource)>,
) -> Result<ReceivedSignal> {
    let first = frames.first().ok_or_else(|| Error::InvalidInput("no frames to propagate".into()))?;
    if taps.is_empty() {
        return Err(Error::InvalidInput("channel has no taps".into()));
    }
    for f in frames {
        if f.n_cp != first.n_cp || f.time_samples.shape() != first.time_samples.shape() {
            return Err(Error::dim("frames in a stream must share their layout"));
        }
    }
    if taps.len() > first.n_cp + 1 {
        return Err(Error::InvalidInput(format!(
            "{} channel taps exceed the cyclic-prefix budget of {}",
            taps.len(),
            first.n_cp + 1
        )));
    }
    let per = first.time_samples.nrows();
    let mut stream = CMat::zeros(per * frames.len(), first.time_samples.ncols());
    for (i, f) in frames.iter().enumerate() {
        stream.rows_mut(i * per, per).copy_from(&f.time_samples);
    }
    let mut samples = convolve(&stream, taps)?;
    let noise_free = add_noise(&mut samples, noise);
    Ok(ReceivedSignal { samples, noise_free })
}
