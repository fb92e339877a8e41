//! C ABI for `roy-detect`.
//!
//! Conventions:
//!
//! * Every fallible function returns an [`RdStatus`] and writes its result
//!   through an out-pointer. On failure the out-pointer is left untouched and
//!   [`rd_last_error_message`] describes the failure on the calling thread.
//! * Objects with state are opaque handles created by `*_new`/`*_load` and
//!   released by the matching `*_free`. Passing NULL to a `*_free` is a no-op.
//! * Panics never cross the boundary; they surface as [`RdStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use roy_detect::asymptotic::{
    asymptotic_power_with, edge_params, spike_params, HighDimParams, SpikeRegime, Tw2Table,
};
use roy_detect::detector::{pd, pfa, roc_closed_form_nm, roc_curve, threshold_for_pfa, DetectorConfig};
use roy_detect::fdist::{central_lmax_cdf, noncentral_lmax_cdf, ModelDims};
use roy_detect::montecarlo::{empirical_cdf, RngSpec, Statistic};
use roy_detect::{Error, SeriesControl};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidDims = 3,
    Domain = 4,
    NonConvergence = 5,
    NumericalBreakdown = 6,
    NotPositiveDefinite = 7,
    BracketFailure = 8,
    Subcritical = 9,
    ClosedFormUnavailable = 10,
    TableFormat = 11,
    Panic = 12,
}

/// Edge parameters `r`, `μ`, `σ₀`, `γ̄_p`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RdEdgeParams {
    pub r: f64,
    pub mu: f64,
    pub sigma0: f64,
    pub gamma_p: f64,
}

/// Spike parameters; `nu` and `sigma1` are NaN when `supercritical` is 0.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RdSpikeParams {
    pub supercritical: i32,
    pub nu: f64,
    pub sigma1: f64,
}

/// Opaque detector handle.
pub struct RdDetector {
    cfg: DetectorConfig,
}

/// Opaque Tracy–Widom table handle.
pub struct RdTw2Table {
    table: Tw2Table,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> RdStatus {
    match e {
        Error::NonConvergence { .. } => RdStatus::NonConvergence,
        Error::Domain(_) => RdStatus::Domain,
        Error::InvalidDims(_) => RdStatus::InvalidDims,
        Error::InvalidArgument(_) => RdStatus::InvalidArgument,
        Error::NotPositiveDefinite { .. } => RdStatus::NotPositiveDefinite,
        Error::NumericalBreakdown { .. } => RdStatus::NumericalBreakdown,
        Error::BracketFailure { .. } => RdStatus::BracketFailure,
        Error::SubcriticalRequest { .. } => RdStatus::Subcritical,
        Error::ClosedFormUnavailable { .. } => RdStatus::ClosedFormUnavailable,
        Error::TableFormat(_) => RdStatus::TableFormat,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into a status plus the thread-local message.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> RdStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RdStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer passed for {what}"));
            RdStatus::NullPointer
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            RdStatus::Panic
        }
    }
}

fn out_ref<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    // SAFETY: the caller guarantees that a non-null pointer is valid and aligned.
    unsafe { p.as_mut() }.ok_or(Failure::Null(what))
}

fn in_ref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    // SAFETY: as for `out_ref`.
    unsafe { p.as_ref() }.ok_or(Failure::Null(what))
}

fn dims(m: usize, n: usize, p: usize) -> Result<ModelDims, Failure> {
    Ok(ModelDims::new(m, n, p)?)
}

/// Message of the last failed call on this thread, or NULL if it succeeded.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn rd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Central CDF `P(λ_max(S⁻¹R) ≤ t)`.
///
/// # Safety
/// Each non-NULL pointer argument must be valid and aligned for its pointee.
#[no_mangle]
pub unsafe extern "C" fn rd_central_cdf(m: usize, n: usize, p: usize, t: f64, out: *mut f64) -> RdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = central_lmax_cdf(&dims(m, n, p)?, t)?;
        Ok(())
    })
}

/// Rank-one non-central CDF with non-centrality `theta > 0`.
///
/// # Safety
/// Each non-NULL pointer argument must be valid and aligned for its pointee.
#[no_mangle]
pub unsafe extern "C" fn rd_noncentral_cdf(m: usize, n: usize, p: usize, theta: f64, t: f64, out: *mut f64) -> RdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = noncentral_lmax_cdf(&dims(m, n, p)?, theta, t, &SeriesControl::default())?;
        Ok(())
    })
}

/// Creates a detector for dimensions `(m, n, p)` and signal strength `gamma`.
///
/// # Safety
/// Each non-NULL pointer argument must be valid and aligned for its pointee.
#[no_mangle]
pub unsafe extern "C" fn rd_detector_new(m: usize, n: usize, p: usize, gamma: f64, out: *mut *mut RdDetector) -> RdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let cfg = DetectorConfig::new(dims(m, n, p)?, gamma)?;
        *out = Box::into_raw(Box::new(RdDetector { cfg }));
        Ok(())
    })
}

/// Releases a detector created by [`rd_detector_new`].
///
/// # Safety
/// `det` must be NULL or a handle from [`rd_detector_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rd_detector_free(det: *mut RdDetector) {
    if !det.is_null() {
        // SAFETY: per the contract above, `det` came from `Box::into_raw`.
        drop(unsafe { Box::from_raw(det) });
    }
}

/// Threshold `ξ_th` achieving false-alarm rate `pf`.
///
/// # Safety
/// Each non-NULL pointer argument must be valid and aligned for its pointee.
#[no_mangle]
pub unsafe extern "C" fn rd_detector_threshold(det: *const RdDetector, pf: f64, out: *mut f64) -> RdStatus {
    guard(|| {
        let det = in_ref(det, "det")?;
        let out = out_ref(out, "out")?;
        *out = threshold_for_pfa(&det.cfg.dims, pf)?;
        Ok(())
    })
}

/// False-alarm probability at threshold `xi`.
///
/// # Safety
/// Each non-NULL pointer argument must be valid and aligned for its pointee.
#[no_mangle]
pub unsafe extern "C" fn rd_detector_pfa(det: *const RdDetector, xi: f64, out: *mut f64) -> RdStatus {
    guard(|| {
        let det = in_ref(det, "det")?;
        let out = out_ref(out, "out")?;
        *out = pfa(&det.cfg.dims, xi)?;
        Ok(())
    })
}

/// Detection probability at threshold `xi`.
///
/// # Safety
/// Each non-NULL pointer argument must be valid and aligned for its pointee.
#[no_mangle]
pub unsafe extern "C" fn rd_detector_pd(det: *const RdDetector, xi: f64, out: *mut f64) -> RdStatus {
    guard(|| {
        let det = in_ref(det, "det")?;
        let out = out_ref(out, "out")?;
        *out = pd(&det.cfg, xi)?;
        Ok(())
    })
}

/// ROC profile on a strictly increasing grid of `len` false-alarm rates.
/// Fills `pd_out[k]` and, when non-NULL, `threshold_out[k]`.
///
/// # Safety
/// `pf_grid` and `pd_out` must hold `len` doubles; `threshold_out` likewise if non-NULL.
#[no_mangle]
pub unsafe extern "C" fn rd_detector_roc(
    det: *const RdDetector,
    pf_grid: *const f64,
    len: usize,
    pd_out: *mut f64,
    threshold_out: *mut f64,
) -> RdStatus {
    guard(|| {
        let det = in_ref(det, "det")?;
        if pf_grid.is_null() {
            return Err(Failure::Null("pf_grid"));
        }
        if pd_out.is_null() {
            return Err(Failure::Null("pd_out"));
        }
        // SAFETY: non-null and of length `len` per the contract.
        let grid = unsafe { std::slice::from_raw_parts(pf_grid, len) };
        let points = roc_curve(&det.cfg, grid)?;
        // SAFETY: as above.
        let pd_slice = unsafe { std::slice::from_raw_parts_mut(pd_out, len) };
        for (slot, pt) in pd_slice.iter_mut().zip(&points) {
            *slot = pt.pd;
        }
        if !threshold_out.is_null() {
            // SAFETY: as above.
            let th = unsafe { std::slice::from_raw_parts_mut(threshold_out, len) };
            for (slot, pt) in th.iter_mut().zip(&points) {
                *slot = pt.threshold;
            }
        }
        Ok(())
    })
}

/// Closed-form `P_D(P_F)` for `n = m`.
///
/// # Safety
/// Each non-NULL pointer argument must be valid and aligned for its pointee.
#[no_mangle]
pub unsafe extern "C" fn rd_roc_closed_form(m: usize, p: usize, gamma: f64, pf: f64, out: *mut f64) -> RdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = roc_closed_form_nm(m, p, gamma, pf, &SeriesControl::default())?;
        Ok(())
    })
}

/// Tracy–Widom centering and scaling for ratios `c1 = m/p`, `c2 = m/n`.
///
/// # Safety
/// Each non-NULL pointer argument must be valid and aligned for its pointee.
#[no_mangle]
pub unsafe extern "C" fn rd_edge_params(c1: f64, c2: f64, out: *mut RdEdgeParams) -> RdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let e = edge_params(&HighDimParams::new(c1, c2, 0.0)?)?;
        *out = RdEdgeParams { r: e.r, mu: e.mu, sigma0: e.sigma0, gamma_p: e.gamma_p };
        Ok(())
    })
}

/// Regime classification and spike parameters at signal strength `gamma_bar`.
///
/// # Safety
/// Each non-NULL pointer argument must be valid and aligned for its pointee.
#[no_mangle]
pub unsafe extern "C" fn rd_spike_params(c1: f64, c2: f64, gamma_bar: f64, out: *mut RdSpikeParams) -> RdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let s = spike_params(&HighDimParams::new(c1, c2, gamma_bar)?)?;
        *out = match s.regime {
            SpikeRegime::Supercritical => RdSpikeParams { supercritical: 1, nu: s.nu()?, sigma1: s.sigma1()? },
            SpikeRegime::Subcritical => RdSpikeParams { supercritical: 0, nu: f64::NAN, sigma1: f64::NAN },
        };
        Ok(())
    })
}

/// Asymptotic power at `m` sensors and level `alpha`. `table` may be NULL
/// for the bundled Tracy–Widom table.
///
/// # Safety
/// Each non-NULL pointer argument must be valid and aligned for its pointee.
#[no_mangle]
pub unsafe extern "C" fn rd_asymptotic_power(
    c1: f64,
    c2: f64,
    gamma_bar: f64,
    m: usize,
    alpha: f64,
    table: *const RdTw2Table,
    out: *mut f64,
) -> RdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        // SAFETY: a non-null `table` is a live handle per the API contract.
        let t = unsafe { table.as_ref() }.map_or(Tw2Table::bundled(), |h| &h.table);
        *out = asymptotic_power_with(&HighDimParams::new(c1, c2, gamma_bar)?, m, alpha, t)?;
        Ok(())
    })
}

/// Loads a Tracy–Widom table from a two-column text file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rd_tw2_table_load(path: *const c_char, out: *mut *mut RdTw2Table) -> RdStatus {
    guard(|| {
        if path.is_null() {
            return Err(Failure::Null("path"));
        }
        let out = out_ref(out, "out")?;
        // SAFETY: non-null NUL-terminated string per the contract.
        let s = unsafe { CStr::from_ptr(path) };
        let s = s
            .to_str()
            .map_err(|_| Error::InvalidArgument("path is not valid UTF-8".into()))?;
        let table = Tw2Table::from_path(Path::new(s))?;
        *out = Box::into_raw(Box::new(RdTw2Table { table }));
        Ok(())
    })
}

/// Releases a table from [`rd_tw2_table_load`].
///
/// # Safety
/// `table` must be NULL or a handle from [`rd_tw2_table_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rd_tw2_table_free(table: *mut RdTw2Table) {
    if !table.is_null() {
        // SAFETY: per the contract above, `table` came from `Box::into_raw`.
        drop(unsafe { Box::from_raw(table) });
    }
}

/// `F₂(s)`; `table` may be NULL for the bundled table.
///
/// # Safety
/// Each non-NULL pointer argument must be valid and aligned for its pointee.
#[no_mangle]
pub unsafe extern "C" fn rd_tw2_cdf(table: *const RdTw2Table, s: f64, out: *mut f64) -> RdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        // SAFETY: a non-null `table` is a live handle per the API contract.
        let t = unsafe { table.as_ref() }.map_or(Tw2Table::bundled(), |h| &h.table);
        *out = t.cdf(s);
        Ok(())
    })
}

/// `F₂⁻¹(q)` for `q ∈ (0, 1)`; `table` may be NULL for the bundled table.
///
/// # Safety
/// Each non-NULL pointer argument must be valid and aligned for its pointee.
#[no_mangle]
pub unsafe extern "C" fn rd_tw2_quantile(table: *const RdTw2Table, q: f64, out: *mut f64) -> RdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidArgument(format!("q must lie in (0, 1), got {q}")).into());
        }
        // SAFETY: a non-null `table` is a live handle per the API contract.
        let t = unsafe { table.as_ref() }.map_or(Tw2Table::bundled(), |h| &h.table);
        *out = t.quantile(q);
        Ok(())
    })
}

/// Draws `trials` Monte Carlo samples of `λ_max` (or of `λ̂_max` when
/// `rescaled` is non-zero) and writes them sorted ascending into `samples_out`.
///
/// # Safety
/// `samples_out` must hold `trials` doubles.
#[no_mangle]
pub unsafe extern "C" fn rd_simulate(
    m: usize,
    n: usize,
    p: usize,
    theta: f64,
    trials: usize,
    seed: u64,
    stream: u64,
    rescaled: i32,
    samples_out: *mut f64,
) -> RdStatus {
    guard(|| {
        if samples_out.is_null() {
            return Err(Failure::Null("samples_out"));
        }
        let which = if rescaled != 0 { Statistic::Rescaled } else { Statistic::Raw };
        let e = empirical_cdf(&dims(m, n, p)?, theta, trials, &RngSpec::new(seed, stream), which)?;
        // SAFETY: non-null and of length `trials` per the contract.
        let out = unsafe { std::slice::from_raw_parts_mut(samples_out, trials) };
        out.copy_from_slice(e.samples());
        Ok(())
    })
}
