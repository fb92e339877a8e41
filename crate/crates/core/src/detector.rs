//! Detection semantics of the largest-root test `λ̂_max(Σ̂⁻¹R̂) > ξ_th`:
//! false-alarm and detection probabilities, threshold inversion and ROC
//! profiles. `λ̂_max = (n/p) λ_max(S⁻¹R)`, so probabilities are evaluated at
//! `κ ξ_th` with `κ = p/n` taken in the original (not remapped) dimensions.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fdist::{
    central_lmax_cdf, effective_dims, k_mn, noncentral_lmax_cdf, EffectiveDims, ModelDims, RANGE_SLACK,
};
use crate::linalg::{det_scaled, DenseMatrix};
use crate::specfun::{factorial, pochhammer, DoubleDouble, ScaledReal, ScaledSum, SeriesControl, WideReal};

/// A detector: model dimensions and the signal strength `γ = tr Ω`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorConfig {
    pub dims: ModelDims,
    pub gamma: f64,
}

impl DetectorConfig {
    pub fn new(dims: ModelDims, gamma: f64) -> Result<Self> {
        dims.validate()?;
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!("gamma must be finite and >= 0, got {gamma}")));
        }
        Ok(Self { dims, gamma })
    }
}

/// One operating point of a ROC profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RocPoint {
    pub pf: f64,
    pub pd: f64,
    pub threshold: f64,
}

/// Probability-space tolerance of [`threshold_for_pfa`].
pub const PFA_TOLERANCE: f64 = 1e-10;

/// Doublings (or halvings) allowed while bracketing a threshold.
const MAX_BRACKET_STEPS: u32 = 60;

fn check_threshold(xi_th: f64) -> Result<()> {
    if !(xi_th > 0.0) {
        return Err(Error::InvalidArgument(format!("threshold must be > 0, got {xi_th}")));
    }
    Ok(())
}

/// `P_F(ξ_th) = 1 − F_{λmax}(κ ξ_th)` under H₀.
pub fn pfa(d: &ModelDims, xi_th: f64) -> Result<f64> {
    check_threshold(xi_th)?;
    Ok(1.0 - central_lmax_cdf(d, d.kappa() * xi_th)?)
}

/// `P_D(γ, ξ_th) = 1 − F_{λmax}(κ ξ_th; γ)` under H₁; `γ = 0` is the null.
pub fn pd(cfg: &DetectorConfig, xi_th: f64) -> Result<f64> {
    pd_with(cfg, xi_th, &SeriesControl::default())
}

pub fn pd_with(cfg: &DetectorConfig, xi_th: f64, ctl: &SeriesControl) -> Result<f64> {
    check_threshold(xi_th)?;
    if cfg.gamma == 0.0 {
        return pfa(&cfg.dims, xi_th);
    }
    Ok(1.0 - noncentral_lmax_cdf(&cfg.dims, cfg.gamma, cfg.dims.kappa() * xi_th, ctl)?)
}

/// Threshold `ξ_th` with `|P_F(ξ_th) − α| ≤ 1e−10`, by bisection in `ln ξ`.
pub fn threshold_for_pfa(d: &ModelDims, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("false-alarm rate must lie in (0, 1), got {alpha}")));
    }
    d.validate()?;
    let mut lo = 1e-6;
    let mut hi = 1.0;
    let mut steps = 0;
    while pfa(d, lo)? <= alpha {
        lo *= 0.5;
        steps += 1;
        if steps > MAX_BRACKET_STEPS {
            return Err(Error::BracketFailure { alpha });
        }
    }
    steps = 0;
    while pfa(d, hi)? >= alpha {
        lo = lo.max(hi);
        hi *= 2.0;
        steps += 1;
        if steps > MAX_BRACKET_STEPS {
            return Err(Error::BracketFailure { alpha });
        }
    }
    let (mut llo, mut lhi) = (lo.ln(), hi.ln());
    let mut best = (f64::INFINITY, hi);
    for _ in 0..200 {
        let mid = 0.5 * (llo + lhi);
        let xi = mid.exp();
        let v = pfa(d, xi)?;
        let err = (v - alpha).abs();
        if err < best.0 {
            best = (err, xi);
        }
        if err <= PFA_TOLERANCE || lhi - llo <= 4.0 * f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
        if v > alpha {
            llo = mid;
        } else {
            lhi = mid;
        }
    }
    Ok(best.1)
}

/// The default false-alarm grid: 0.01, 0.02, …, 0.99.
pub fn default_pf_grid() -> Vec<f64> {
    (1..=99).map(|k| k as f64 / 100.0).collect()
}

/// `n` log-spaced false-alarm rates from `lo` to `hi`.
pub fn log_pf_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi < 1.0 && lo < hi) || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "log grid needs 0 < lo < hi < 1 and n >= 2 (got {lo}, {hi}, {n})"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect())
}

/// ROC profile: for each `pf`, the threshold and the detection probability.
/// Points are evaluated in parallel; the output order follows the grid.
pub fn roc_curve(cfg: &DetectorConfig, pf_grid: &[f64]) -> Result<Vec<RocPoint>> {
    roc_curve_with(cfg, pf_grid, &SeriesControl::default())
}

pub fn roc_curve_with(cfg: &DetectorConfig, pf_grid: &[f64], ctl: &SeriesControl) -> Result<Vec<RocPoint>> {
    if pf_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("false-alarm grid must be strictly increasing".into()));
    }
    pf_grid
        .par_iter()
        .map(|&pf| {
            let threshold = threshold_for_pfa(&cfg.dims, pf)?;
            let pd = pd_with(cfg, threshold, ctl)?;
            Ok(RocPoint { pf, pd, threshold })
        })
        .collect()
}

/// Closed-form ROC for `n = m`: `P_D` directly as a function of `P_F`.
///
/// `P_D = 1 − 𝒦_{m,m} γ^{1−m} e^{−γ} (1−P_F)^{1−(1−1/m)/p} det[1/(β+i+j−1), η_i(γ(1−P_F)^{1/(mp)})]`
/// with `η_i(z) = ₂F₂(m+β+1, β+i; β+1, β+i+1; z)/(β+i)`. For `p < m` the
/// dimensions are remapped first (which keeps `n = m`).
pub fn roc_closed_form_nm(m: usize, p: usize, gamma: f64, pf: f64, ctl: &SeriesControl) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!("gamma must be finite and > 0, got {gamma}")));
    }
    if !(pf > 0.0 && pf < 1.0) {
        return Err(Error::InvalidArgument(format!("false-alarm rate must lie in (0, 1), got {pf}")));
    }
    let e = effective_dims(&ModelDims::new(m, m, p)?)?;
    let f = closed_form_cdf(&e, gamma, pf, ctl)?;
    if !(f.is_finite() && (-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&f)) {
        return Err(Error::NumericalBreakdown {
            context: "roc_closed_form_nm".into(),
            value: f,
        });
    }
    Ok(1.0 - f.clamp(0.0, 1.0))
}

/// Relative size below which a tail term no longer changes a double-double sum.
const CLOSED_FORM_TAIL_TOL: f64 = 1e-33;

/// `η_i(z) = Σ_ℓ (a)_ℓ/((b)_ℓ ℓ!) z^ℓ/(β+i+ℓ)` with `a = m+β+1`, `b = β+1`.
/// The `ℓ ≤ m−2` terms are multiples of the Hilbert-like columns
/// `1/(β+i+j−1)` and cancel in the determinant, so the last column keeps only
/// the positive tail from `ℓ = m−1`, which avoids the cancellation that makes
/// the plain form lose digits once `m` reaches about 8.
fn closed_form_cdf(e: &EffectiveDims, gamma: f64, pf: f64, ctl: &SeriesControl) -> Result<f64> {
    let (m, p, beta) = (e.m, e.p, e.beta());
    let survive = 1.0 - pf;
    let x = survive.powf(1.0 / (m * p) as f64);
    let w = DoubleDouble::from;
    let z = w(gamma) * w(x);
    let mut mat = DenseMatrix::from_fn(m, m, |_, _| WideReal::zero());
    for i in 1..=m {
        for j in 1..m {
            mat[(i - 1, j - 1)] = WideReal::from_mantissa(w(1.0) / w((beta + i + j - 1) as f64));
        }
    }

    let (a, b) = ((m + beta) as f64 + 1.0, beta as f64 + 1.0);
    let l0 = m - 1;
    let mut coef = pochhammer(a, l0 as u64).widen() / (pochhammer(b, l0 as u64) * factorial(l0 as u64)).widen()
        * WideReal::from_mantissa(z).powi(l0 as i64)
        * WideReal::from_mantissa(w(gamma)).powi(1 - m as i64)
        * ScaledReal::exp(-gamma).widen();
    let mut sums: Vec<ScaledSum<DoubleDouble>> = (0..m).map(|_| ScaledSum::new()).collect();
    let peak = gamma * x;
    let mut quiet = 0;
    let mut ell = l0;
    loop {
        if ell - l0 > ctl.max_terms {
            return Err(Error::NonConvergence {
                what: "closed-form ROC tail series",
                max_terms: ctl.max_terms,
            });
        }
        let mut negligible = true;
        for (i, sum) in sums.iter_mut().enumerate() {
            let term = coef.mul_mantissa(w(1.0) / w((beta + i + 1 + ell) as f64));
            sum.add(term);
            if !((term / sum.value()).to_f64().abs() < CLOSED_FORM_TAIL_TOL) {
                negligible = false;
            }
        }
        if negligible && ell as f64 > peak {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        let lf = ell as f64;
        coef = coef.mul_mantissa(w(a + lf) * z / w((b + lf) * (lf + 1.0)));
        ell += 1;
    }
    for (i, sum) in sums.iter().enumerate() {
        mat[(i, m - 1)] = sum.value();
    }
    let det = det_scaled(&mat)?;
    let power = 1.0 - (1.0 - 1.0 / m as f64) / p as f64;
    let v = k_mn(e).widen() * ScaledReal::from_f64(survive.powf(power)).widen() * det;
    Ok(v.to_f64())
}
