use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{C64, CMat};
use crate::rng::GaussianSource;

/// Per-subcarrier channel matrices `H(k)`, each `n_rx x n_tx`.
#[derive(Clone, Debug, PartialEq)]
pub struct FreqChannel {
    pub per_subcarrier: Vec<CMat>,
    /// Impulse response `h(l)` the subcarrier matrices were derived from, if any.
    pub taps: Option<Vec<CMat>>,
    /// Seed used to draw this realization, if it was generated.
    pub seed: Option<u64>,
}

/// On-disk channel layout. Entries are `[re, im]` pairs, row-major within
/// each subcarrier matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub n_tx: usize,
    pub n_rx: usize,
    pub n_sc: usize,
    pub seed: Option<u64>,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl FreqChannel {
    pub fn new(per_subcarrier: Vec<CMat>) -> Result<Self> {
        let first = per_subcarrier
            .first()
            .ok_or_else(|| Error::InvalidInput("channel needs at least one subcarrier".into()))?;
        let shape = first.shape();
        if per_subcarrier.iter().any(|h| h.shape() != shape) {
            return Err(Error::dim("subcarrier matrices differ in shape"));
        }
        Ok(Self { per_subcarrier, taps: None, seed: None })
    }

    /// I.i.d. standard complex Gaussian entries, drawn independently per subcarrier.
    pub fn random_iid(n_tx: usize, n_rx: usize, n_sc: usize, rng: &mut GaussianSource) -> Self {
        let per_subcarrier = (0..n_sc).map(|_| rng.complex_matrix(n_rx, n_tx, 1.0)).collect();
        Self { per_subcarrier, taps: None, seed: None }
    }

    pub fn random_iid_seeded(n_tx: usize, n_rx: usize, n_sc: usize, seed: u64) -> Self {
        let mut rng = GaussianSource::new(seed);
        Self { seed: Some(seed), ..Self::random_iid(n_tx, n_rx, n_sc, &mut rng) }
    }

    /// Multipath channel with `n_taps` equal-power taps; the total power per
    /// link is one, so each `H(k)` entry is standard complex Gaussian.
    pub fn random_taps(
        n_tx: usize,
        n_rx: usize,
        n_sc: usize,
        n_taps: usize,
        rng: &mut GaussianSource,
    ) -> Result<Self> {
        if n_taps == 0 {
            return Err(Error::InvalidInput("need at least one tap".into()));
        }
        let var = 1.0 / n_taps as f64;
        let taps = (0..n_taps).map(|_| rng.complex_matrix(n_rx, n_tx, var)).collect();
        Self::from_taps(taps, n_sc)
    }

    /// `H(k) = sum_l h(l) exp(-j 2 pi l k / N)`.
    pub fn from_taps(taps: Vec<CMat>, n_sc: usize) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidInput("need at least one tap".into()));
        }
        if taps.len() > n_sc {
            return Err(Error::InvalidInput(format!(
                "{} taps exceed the {n_sc}-point DFT",
                taps.len()
            )));
        }
        let (rows, cols) = taps[0].shape();
        if taps.iter().any(|t| t.shape() != (rows, cols)) {
            return Err(Error::dim("taps differ in shape"));
        }
        let per_subcarrier = (0..n_sc).map(|k| dft_bin(&taps, k, n_sc)).collect();
        Ok(Self { per_subcarrier, taps: Some(taps), seed: None })
    }

    pub fn n_sc(&self) -> usize {
        self.per_subcarrier.len()
    }

    pub fn n_rx(&self) -> usize {
        self.per_subcarrier[0].nrows()
    }

    pub fn n_tx(&self) -> usize {
        self.per_subcarrier[0].ncols()
    }

    pub fn h(&self, k: usize) -> &CMat {
        &self.per_subcarrier[k]
    }

    /// Worst relative mismatch between `H(k)` and the DFT of the stored taps.
    pub fn tap_consistency_error(&self) -> Option<f64> {
        let taps = self.taps.as_ref()?;
        let n = self.n_sc();
        let worst = (0..n)
            .map(|k| {
                let expect = dft_bin(taps, k, n);
                (&self.per_subcarrier[k] - &expect).norm() / expect.norm().max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max);
        Some(worst)
    }

    pub fn check_against(&self, n_tx: usize, n_rx: usize, n_sc: usize) -> Result<()> {
        if self.n_tx() != n_tx || self.n_rx() != n_rx || self.n_sc() != n_sc {
            return Err(Error::dim(format!(
                "channel is {}x{} over {} subcarriers, configuration expects {n_rx}x{n_tx} over {n_sc}",
                self.n_rx(),
                self.n_tx(),
                self.n_sc()
            )));
        }
        Ok(())
    }

    pub fn to_file(&self) -> ChannelFile {
        let entries = self
            .per_subcarrier
            .iter()
            .map(|h| {
                let mut row_major = Vec::with_capacity(h.len());
                for i in 0..h.nrows() {
                    for j in 0..h.ncols() {
                        row_major.push([h[(i, j)].re, h[(i, j)].im]);
                    }
                }
                row_major
            })
            .collect();
        ChannelFile { n_tx: self.n_tx(), n_rx: self.n_rx(), n_sc: self.n_sc(), seed: self.seed, entries }
    }

    pub fn from_file(file: &ChannelFile) -> Result<Self> {
        if file.entries.len() != file.n_sc {
            return Err(Error::dim(format!(
                "channel file lists {} subcarriers, header says {}",
                file.entries.len(),
                file.n_sc
            )));
        }
        let per_subcarrier = file
            .entries
            .iter()
            .map(|e| {
                if e.len() != file.n_rx * file.n_tx {
                    return Err(Error::dim("channel file entry count does not match n_rx * n_tx"));
                }
                Ok(CMat::from_row_iterator(
                    file.n_rx,
                    file.n_tx,
                    e.iter().map(|&[re, im]| C64::new(re, im)),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut chan = Self::new(per_subcarrier)?;
        chan.seed = file.seed;
        Ok(chan)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(&self.to_file())?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: ChannelFile = serde_json::from_str(&text)?;
        Self::from_file(&file)
    }
}

fn dft_bin(taps: &[CMat], k: usize, n: usize) -> CMat {
    let mut acc = CMat::zeros(taps[0].nrows(), taps[0].ncols());
    for (l, tap) in taps.iter().enumerate() {
        let phase = -TAU * ((l * k) % n) as f64 / n as f64;
        acc += tap * C64::from_polar(1.0, phase);
    }
    acc
}
