//! C interface to the precoder designs.
//!
//! Objects cross the boundary as opaque handles created by `*_new`-style
//! constructors and released with the matching `*_free`. Every fallible call
//! returns a [`DfrcStatus`]; on failure the message is available from
//! [`dfrc_last_error_message`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use dfrc::design::{DesignOutcome, DesignReport, Designer, Strategy};
use dfrc::model::{FreqChannel, SystemConfig};
use dfrc::opt::SqpOptions;
use dfrc::radar::{angle_grid, RadarScene};
use dfrc::radar_design::RadarOnlyDesign;
use dfrc::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DfrcStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad dimensions, parameters or configuration.
    InvalidArgument = 2,
    /// A solver failed or did not converge.
    SolverFailure = 3,
    Io = 4,
    /// The output buffer is shorter than required.
    BufferTooSmall = 5,
    /// The design carries no data link (radar-only).
    NoData = 6,
    Panic = 7,
}

/// Design strategy selector.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DfrcStrategy {
    IsiMinStrict = 0,
    IsiMinTradeoff = 1,
    ArmaxTradeoff = 2,
    CommOnly = 3,
    RadarOnly = 4,
}

impl From<DfrcStrategy> for Strategy {
    fn from(s: DfrcStrategy) -> Self {
        match s {
            DfrcStrategy::IsiMinStrict => Strategy::IsiMinStrict,
            DfrcStrategy::IsiMinTradeoff => Strategy::IsiMinTradeoff,
            DfrcStrategy::ArmaxTradeoff => Strategy::ArmaxTradeoff,
            DfrcStrategy::CommOnly => Strategy::CommOnly,
            DfrcStrategy::RadarOnly => Strategy::RadarOnly,
        }
    }
}

/// System and scene parameters for a design. Fill with
/// [`dfrc_params_default`] and override fields as needed.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DfrcParams {
    pub total_power: f64,
    /// Communication SNR; the noise variance is `total_power * 10^(-snr_db/10)`.
    pub snr_db: f64,
    pub antenna_spacing: f64,
    pub symbol_energy: f64,
    /// Target angle in radians.
    pub target_theta: f64,
    /// Echo SNR (linear).
    pub radar_snr: f64,
    pub sqp_tol: f64,
    pub sqp_max_iter: usize,
}

/// Summary metrics of a design. Absent values are NaN (or -1 for counts).
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DfrcMetrics {
    /// Bits per subcarrier use.
    pub rate: f64,
    pub rate_ideal: f64,
    pub crb: f64,
    /// CRB over the strict design's CRB.
    pub normalized_crb: f64,
    /// Beampattern mismatch against the strict design.
    pub nmse: f64,
    pub sqp_iterations: i64,
}

/// Per-subcarrier channel matrices.
pub struct DfrcChannel {
    inner: FreqChannel,
}

/// A design together with the inputs needed to evaluate it.
pub struct DfrcDesign {
    outcome: DesignOutcome,
    report: DesignReport,
    config: SystemConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> DfrcStatus {
    match e {
        Error::Io(_) => DfrcStatus::Io,
        e if e.is_validation() => DfrcStatus::InvalidArgument,
        _ => DfrcStatus::SolverFailure,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (DfrcStatus, String)>) -> DfrcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DfrcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            DfrcStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (DfrcStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (DfrcStatus, String) {
    (DfrcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn path_arg(path: *const c_char) -> Result<PathBuf, (DfrcStatus, String)> {
    if path.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(path)
        .to_str()
        .map_err(|_| (DfrcStatus::InvalidArgument, "path is not valid UTF-8".to_string()))?;
    Ok(PathBuf::from(s))
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dfrc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dfrc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Writes the default parameters (20 dB, unit power, target at broadside).
///
/// # Safety
/// `out` must be null or point to writable memory for one `DfrcParams`.
#[no_mangle]
pub unsafe extern "C" fn dfrc_params_default(out: *mut DfrcParams) -> DfrcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let sys = SystemConfig::default();
        let scene = RadarScene::default();
        let sqp = SqpOptions::default();
        out.write(DfrcParams {
            total_power: sys.total_power,
            snr_db: 20.0,
            antenna_spacing: sys.antenna_spacing,
            symbol_energy: sys.symbol_energy,
            target_theta: scene.theta,
            radar_snr: scene.snr,
            sqp_tol: sqp.tol,
            sqp_max_iter: sqp.max_iter,
        });
        Ok(())
    })
}

/// I.i.d. standard complex Gaussian channel drawn from `seed`.
///
/// # Safety
/// `out` must be null or point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn dfrc_channel_random(
    n_tx: usize,
    n_rx: usize,
    n_sc: usize,
    seed: u64,
    out: *mut *mut DfrcChannel,
) -> DfrcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if n_tx == 0 || n_rx == 0 || n_sc == 0 {
            return Err((DfrcStatus::InvalidArgument, "channel dimensions must be positive".into()));
        }
        let inner = FreqChannel::random_iid_seeded(n_tx, n_rx, n_sc, seed);
        out.write(Box::into_raw(Box::new(DfrcChannel { inner })));
        Ok(())
    })
}

/// Reads a channel JSON file.
///
/// # Safety
/// `path` must be null or a NUL-terminated string; `out` must be null or
/// point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn dfrc_channel_load(path: *const c_char, out: *mut *mut DfrcChannel) -> DfrcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = path_arg(path)?;
        let inner = FreqChannel::load_json(&path).map_err(lib_err)?;
        out.write(Box::into_raw(Box::new(DfrcChannel { inner })));
        Ok(())
    })
}

/// Writes the channel as JSON.
///
/// # Safety
/// `channel` must be null or a live handle; `path` must be null or a
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dfrc_channel_save(channel: *const DfrcChannel, path: *const c_char) -> DfrcStatus {
    guard(|| {
        let chan = channel.as_ref().ok_or_else(|| null("channel"))?;
        let path = path_arg(path)?;
        chan.inner.save_json(&path).map_err(lib_err)
    })
}

/// # Safety
/// `channel` must be null or a live handle; each out pointer must be null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn dfrc_channel_dims(
    channel: *const DfrcChannel,
    n_tx: *mut usize,
    n_rx: *mut usize,
    n_sc: *mut usize,
) -> DfrcStatus {
    guard(|| {
        let chan = &channel.as_ref().ok_or_else(|| null("channel"))?.inner;
        for (p, v) in [(n_tx, chan.n_tx()), (n_rx, chan.n_rx()), (n_sc, chan.n_sc())] {
            if !p.is_null() {
                p.write(v);
            }
        }
        Ok(())
    })
}

/// Releases a channel. Null is ignored.
///
/// # Safety
/// `channel` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dfrc_channel_free(channel: *mut DfrcChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

fn system_for(chan: &FreqChannel, p: &DfrcParams) -> SystemConfig {
    SystemConfig {
        n_tx: chan.n_tx(),
        n_rx: chan.n_rx(),
        n_sc: chan.n_sc(),
        total_power: p.total_power,
        antenna_spacing: p.antenna_spacing,
        symbol_energy: p.symbol_energy,
        ..SystemConfig::default()
    }
    .with_snr_db(p.snr_db)
}

/// Designs precoders for `channel`. `rho` is the trade-off factor and is
/// ignored by the strategies that take none. Radar metrics are relative to
/// the strict ISI-min design on the same channel.
///
/// # Safety
/// `channel` and `params` must be null or valid; `out` must be null or point
/// to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn dfrc_design_new(
    channel: *const DfrcChannel,
    params: *const DfrcParams,
    strategy: DfrcStrategy,
    rho: f64,
    out: *mut *mut DfrcDesign,
) -> DfrcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let chan = &channel.as_ref().ok_or_else(|| null("channel"))?.inner;
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let config = system_for(chan, p);
        let scene = RadarScene { theta: p.target_theta, snr: p.radar_snr, ..RadarScene::default() };
        scene.validate().map_err(lib_err)?;
        let sqp = SqpOptions { tol: p.sqp_tol, max_iter: p.sqp_max_iter, ..SqpOptions::default() };
        let strategy = Strategy::from(strategy);
        let mut designer = Designer::new(chan, &config, &scene, sqp).map_err(lib_err)?;
        let outcome = designer.design(strategy, strategy.takes_factor().then_some(rho)).map_err(lib_err)?;
        outcome.validate(config.total_power).map_err(lib_err)?;
        let strict = designer.design(Strategy::IsiMinStrict, None).map_err(lib_err)?;
        let reference = RadarOnlyDesign {
            covariance: strict.radar_covariance().clone(),
            achieved_crb: strict.crb(&config, &scene).map_err(lib_err)?,
        };
        let report = outcome.report(chan, &config, &scene, &reference).map_err(lib_err)?;
        out.write(Box::into_raw(Box::new(DfrcDesign { outcome, report, config })));
        Ok(())
    })
}

/// Releases a design. Null is ignored.
///
/// # Safety
/// `design` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dfrc_design_free(design: *mut DfrcDesign) {
    if !design.is_null() {
        drop(Box::from_raw(design));
    }
}

/// # Safety
/// `design` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn dfrc_design_metrics(design: *const DfrcDesign, out: *mut DfrcMetrics) -> DfrcStatus {
    guard(|| {
        let d = design.as_ref().ok_or_else(|| null("design"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = &d.report;
        out.write(DfrcMetrics {
            rate: r.rate,
            rate_ideal: r.rate_ideal.unwrap_or(f64::NAN),
            crb: r.achieved_crb.unwrap_or(f64::INFINITY),
            normalized_crb: r.normalized_crb.unwrap_or(f64::INFINITY),
            nmse: r.nmse,
            sqp_iterations: d.outcome.sqp_iterations().map_or(-1, |i| i as i64),
        });
        Ok(())
    })
}

/// Copies `W(k)` (`n_tx x n_rx`, row-major) into `re` and `im`, each of
/// length at least `n_tx * n_rx`, and its stream powers into `powers`
/// (length at least `n_rx`, may be null).
///
/// # Safety
/// Buffers must be null or valid for `len` (and `powers_len`) elements.
#[no_mangle]
pub unsafe extern "C" fn dfrc_design_precoder(
    design: *const DfrcDesign,
    subcarrier: usize,
    re: *mut f64,
    im: *mut f64,
    len: usize,
    powers: *mut f64,
    powers_len: usize,
) -> DfrcStatus {
    guard(|| {
        let d = design.as_ref().ok_or_else(|| null("design"))?;
        let pre = d.outcome.precoders.as_ref().ok_or((DfrcStatus::NoData, "design carries no data link".into()))?;
        if subcarrier >= pre.n_sc() {
            return Err((DfrcStatus::InvalidArgument, format!("subcarrier {subcarrier} out of range")));
        }
        if re.is_null() || im.is_null() {
            return Err(null("output buffer"));
        }
        let w = &pre.precoders[subcarrier];
        let need = w.nrows() * w.ncols();
        if len < need {
            return Err((DfrcStatus::BufferTooSmall, format!("need {need} entries, got {len}")));
        }
        let (re, im) = (std::slice::from_raw_parts_mut(re, need), std::slice::from_raw_parts_mut(im, need));
        for i in 0..w.nrows() {
            for j in 0..w.ncols() {
                re[i * w.ncols() + j] = w[(i, j)].re;
                im[i * w.ncols() + j] = w[(i, j)].im;
            }
        }
        if !powers.is_null() {
            let p = &pre.stream_powers[subcarrier];
            if powers_len < p.len() {
                return Err((DfrcStatus::BufferTooSmall, format!("need {} stream powers, got {powers_len}", p.len())));
            }
            std::slice::from_raw_parts_mut(powers, p.len()).copy_from_slice(p.as_slice());
        }
        Ok(())
    })
}

/// Copies the per-subcarrier weights (length `n_sc`).
///
/// # Safety
/// `out` must be null or valid for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn dfrc_design_weights(design: *const DfrcDesign, out: *mut f64, len: usize) -> DfrcStatus {
    guard(|| {
        let d = design.as_ref().ok_or_else(|| null("design"))?;
        let w = d.outcome.weights.as_ref().ok_or((DfrcStatus::NoData, "design has no subcarrier weights".into()))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if len < w.len() {
            return Err((DfrcStatus::BufferTooSmall, format!("need {} weights, got {len}", w.len())));
        }
        std::slice::from_raw_parts_mut(out, w.len()).copy_from_slice(w);
        Ok(())
    })
}

/// Samples the transmit beampattern on `points` angles uniformly spaced over
/// [-pi/2, pi/2]. `angles` may be null.
///
/// # Safety
/// `gains` (and `angles` if non-null) must be valid for `points` elements.
#[no_mangle]
pub unsafe extern "C" fn dfrc_design_beampattern(
    design: *const DfrcDesign,
    points: usize,
    angles: *mut f64,
    gains: *mut f64,
) -> DfrcStatus {
    guard(|| {
        let d = design.as_ref().ok_or_else(|| null("design"))?;
        if gains.is_null() {
            return Err(null("gains"));
        }
        if points < 2 {
            return Err((DfrcStatus::InvalidArgument, "need at least two angles".into()));
        }
        let pattern = d.outcome.beampattern(&d.config, &angle_grid(points));
        std::slice::from_raw_parts_mut(gains, points).copy_from_slice(&pattern.gains);
        if !angles.is_null() {
            std::slice::from_raw_parts_mut(angles, points).copy_from_slice(&pattern.angles);
        }
        Ok(())
    })
}

/// Full design report as a JSON string. Release it with
/// [`dfrc_string_free`].
///
/// # Safety
/// `design` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn dfrc_design_to_json(design: *const DfrcDesign, out: *mut *mut c_char) -> DfrcStatus {
    guard(|| {
        let d = design.as_ref().ok_or_else(|| null("design"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = serde_json::to_string(&d.report).map_err(|e| (DfrcStatus::InvalidArgument, e.to_string()))?;
        let c = CString::new(text).map_err(|e| (DfrcStatus::InvalidArgument, e.to_string()))?;
        out.write(c.into_raw());
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from [`dfrc_design_to_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dfrc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
