use crate::error::{Error, Result};
use crate::linalg::{det_scaled, DenseMatrix};
use crate::specfun::{factorial, pochhammer, DoubleDouble, ScaledReal, ScaledSum, SeriesControl, WideReal};

use super::dims::{effective_dims, EffectiveDims, ModelDims};
use super::kernels::{k_mn, moment_kernel, psi_entry_with, wide_x, xi_entry, PsiConvention};
use super::finalize;

/// Relative size below which a tail-series term counts as negligible.
const TAIL_TOL: f64 = 1e-33;

fn check_theta_t(theta: f64, t: f64) -> Result<()> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "theta must be finite and > 0, got {theta}; use central_lmax_cdf for the null"
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t must be >= 0, got {t}")));
    }
    Ok(())
}

/// `P(λ_max(S⁻¹R) ≤ t)` for a rank-one non-centrality `θ > 0`.
///
/// The last determinant column is expanded in powers of `θx`; its first
/// `m − 1` coefficients are combinations of the `ψ` columns and drop out,
/// which leaves a series of positive terms with `θ^{1−m} e^{−θ}` folded into
/// its coefficients. Entries and the elimination are carried in double-double.
pub fn noncentral_lmax_cdf(d: &ModelDims, theta: f64, t: f64, ctl: &SeriesControl) -> Result<f64> {
    let e = effective_dims(d)?;
    check_theta_t(theta, t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    if t.is_infinite() {
        return Ok(1.0);
    }
    let v = reduced_value(&e, theta, t, ctl)?;
    finalize(v.to_f64(), "noncentral_lmax_cdf")
}

fn reduced_value(e: &EffectiveDims, theta: f64, t: f64, ctl: &SeriesControl) -> Result<WideReal> {
    let (m, alpha, beta) = (e.m, e.alpha(), e.beta());
    let x = wide_x(t);
    let xf = x.hi();
    let a = (e.n + beta) as f64 + 1.0;
    let b = beta as f64 + 1.0;

    // h(s) for s = β+1, β+2, ... shared by every row.
    let mut kernel: Vec<WideReal> = Vec::new();
    let mut h = |s_index: usize| -> Result<WideReal> {
        while kernel.len() <= s_index {
            let s = (beta + 1 + kernel.len()) as f64;
            kernel.push(moment_kernel(alpha, s, x)?);
        }
        Ok(kernel[s_index])
    };

    let mut mat = DenseMatrix::from_fn(m, m, |_, _| WideReal::zero());
    for i in 0..m {
        for j in 0..m.saturating_sub(1) {
            mat[(i, j)] = h(i + j)?;
        }
    }

    // c_ℓ = (a)_ℓ / ((b)_ℓ ℓ!) x^ℓ θ^{ℓ+1−m} e^{−θ}, starting at ℓ₀ = m − 1.
    let l0 = m - 1;
    let w = |v: f64| DoubleDouble::from(v);
    let mut coef = pochhammer(a, l0 as u64).widen() / (pochhammer(b, l0 as u64) * factorial(l0 as u64)).widen()
        * WideReal::from_mantissa(x).powi(l0 as i64)
        * ScaledReal::exp(-theta).widen();
    let theta_x = w(theta) * x;
    let mut sums: Vec<ScaledSum<DoubleDouble>> = (0..m).map(|_| ScaledSum::new()).collect();
    let peak = theta * xf;
    let mut quiet = 0;
    let mut ell = l0;
    loop {
        if ell - l0 > ctl.max_terms {
            return Err(Error::NonConvergence {
                what: "noncentral CDF tail series",
                max_terms: ctl.max_terms,
            });
        }
        let mut negligible = true;
        for (i, sum) in sums.iter_mut().enumerate() {
            let term = coef * h(i + ell)?;
            sum.add(term);
            let rel = (term / sum.value()).to_f64().abs();
            if !(rel < TAIL_TOL) {
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
        coef = coef.mul_mantissa(w(a + lf) * theta_x / w((b + lf) * (lf + 1.0)));
        ell += 1;
    }
    for (i, sum) in sums.iter().enumerate() {
        mat[(i, m - 1)] = sum.value();
    }
    let det = det_scaled(&mat)?;
    let pref = (k_mn(e) / factorial(alpha as u64)).widen()
        * WideReal::from_mantissa(x).powi(((e.p - 1) * m + 1) as i64);
    Ok(pref * det)
}

/// Direct evaluation of `𝒦 θ^{1−m} e^{−θ} x^{(p−1)m+1} det[ψ_{i,j}(x) ξ_i(θ,x)]`
/// in plain double precision, with the `ψ` block under either convention
/// and `ξ_i` from its alternating sum. No clamping or range checks; this is
/// the raw value used to compare conventions.
///
/// The [`PsiConvention::LimitDisplay`] columns are laid out in descending
/// `θ`-derivative order; relabelling them as ascending multiplies the
/// determinant by `(−1)^{⌊(m−1)/2⌋}`, which is applied here.
pub fn noncentral_lmax_cdf_direct(
    d: &ModelDims,
    theta: f64,
    t: f64,
    conv: PsiConvention,
    ctl: &SeriesControl,
) -> Result<f64> {
    let e = effective_dims(d)?;
    check_theta_t(theta, t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let m = e.m;
    let x = super::x_of_t(t);
    let mut mat = DenseMatrix::from_fn(m, m, |_, _| ScaledReal::zero());
    for i in 1..=m {
        for j in 1..m {
            mat[(i - 1, j - 1)] = ScaledReal::from_f64(psi_entry_with(i, j, x, &e, conv)?);
        }
        mat[(i - 1, m - 1)] = xi_entry(i, theta, x, &e, ctl)?;
    }
    let mut det = det_scaled(&mat)?;
    if conv == PsiConvention::LimitDisplay && ((m - 1) / 2) % 2 == 1 {
        det = -det;
    }
    let v = k_mn(&e)
        * ScaledReal::from_f64(theta).powi(1 - m as i64)
        * ScaledReal::exp(-theta)
        * ScaledReal::from_f64(x).powi(((e.p - 1) * m + 1) as i64)
        * det;
    Ok(v.to_f64())
}
