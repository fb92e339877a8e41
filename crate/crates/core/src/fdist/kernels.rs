use crate::error::{Error, Result};
use crate::specfun::{
    factorial, factorial_ratio, hyp1f1, hyp2f1_terminating, hyp2f1_terminating_in, hyp2f2, DoubleDouble,
    GaussLegendre, ScaledReal, ScaledSum, SeriesControl, WideReal,
};

use super::dims::EffectiveDims;

/// The two readings of the `ψ_{i,j}` kernel denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsiConvention {
    /// `₂F₁(−α, p+i−j−1; p+i−j; x) / (p+i+j−m−1)`.
    Printed,
    /// `₂F₁(−α, p+i−j−1; p+i−j; x) / (p+i−j−1)`, the form produced by the
    /// `θ → 0` limit of the `φ_i` columns. This is the one the CDF uses.
    LimitDisplay,
}

impl PsiConvention {
    pub fn name(self) -> &'static str {
        match self {
            Self::Printed => "printed",
            Self::LimitDisplay => "limit-display",
        }
    }
}

fn check_x(x: f64) -> Result<()> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!("x must lie in [0, 1), got {x}")));
    }
    Ok(())
}

fn check_row(i: usize, d: &EffectiveDims) -> Result<()> {
    if i == 0 || i > d.m {
        return Err(Error::InvalidArgument(format!("row index {i} outside 1..={}", d.m)));
    }
    Ok(())
}

/// `ψ_{i,j}(x)` in the [`PsiConvention::LimitDisplay`] form.
pub fn psi_entry(i: usize, j: usize, x: f64, d: &EffectiveDims) -> Result<f64> {
    psi_entry_with(i, j, x, d, PsiConvention::LimitDisplay)
}

/// `ψ_{i,j}(x)` under either denominator convention.
pub fn psi_entry_with(i: usize, j: usize, x: f64, d: &EffectiveDims, conv: PsiConvention) -> Result<f64> {
    check_row(i, d)?;
    if j == 0 || j >= d.m {
        return Err(Error::InvalidArgument(format!("column index {j} outside 1..{}", d.m)));
    }
    check_x(x)?;
    let (m, p, i, j) = (d.m as i64, d.p as i64, i as i64, j as i64);
    let b = (p + i - j - 1) as f64;
    let denom = match conv {
        PsiConvention::Printed => p + i + j - m - 1,
        PsiConvention::LimitDisplay => p + i - j - 1,
    };
    if denom == 0 {
        return Err(Error::Domain(format!("psi denominator vanishes at (i={i}, j={j})")));
    }
    Ok(hyp2f1_terminating(d.alpha() as u32, b, b + 1.0, x)? / denom as f64)
}

/// `ξ_i(θ, x) = Σ_{k=0}^{α} (−x)^k ₂F₂(n+β+1, β+i+k; β+1, β+i+k+1; θx) / (k!(α−k)!(β+i+k))`,
/// summed directly. The alternating sum cancels heavily as `x → 1`; the CDF
/// itself uses a rearranged positive series.
pub fn xi_entry(i: usize, theta: f64, x: f64, d: &EffectiveDims, ctl: &SeriesControl) -> Result<ScaledReal> {
    check_row(i, d)?;
    check_x(x)?;
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::InvalidArgument(format!("theta must be finite and > 0, got {theta}")));
    }
    let alpha = d.alpha() as u64;
    let beta = d.beta() as f64;
    let a = (d.n + d.beta()) as f64 + 1.0;
    let mut sum = ScaledSum::<f64>::new();
    let mut xk = ScaledReal::one();
    for k in 0..=alpha {
        let bik = beta + i as f64 + k as f64;
        let f = hyp2f2(a, bik, beta + 1.0, bik + 1.0, theta * x, ctl)?;
        let denom = factorial(k) * factorial(alpha - k);
        let term = (f * xk / denom).mul_f64(1.0 / bik);
        sum.add(term);
        xk = xk.mul_f64(-x);
    }
    Ok(sum.value())
}

/// Gauss–Legendre value of `φ_i(x, θ) = ∫₀ˣ y^{β+i−1} (1−y)^α ₁F₁(n+β+1; β+1; θy) dy`,
/// 256 nodes on each of `[0, x/2]` and `[x/2, x]`.
pub fn phi_oracle(i: usize, theta: f64, x: f64, d: &EffectiveDims) -> Result<f64> {
    check_row(i, d)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x must lie in [0, 1], got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let alpha = d.alpha() as i32;
    let beta = d.beta() as f64;
    let a = (d.n + d.beta()) as f64 + 1.0;
    // Run each ₁F₁ series to full double precision.
    let ctl = SeriesControl::new(1e-17, 100_000)?;
    let rule = GaussLegendre::new(256);
    let mut failure = None;
    let mut f = |y: f64| -> f64 {
        match hyp1f1(a, beta + 1.0, theta * y, &ctl) {
            Ok(v) => y.powf(beta + i as f64 - 1.0) * (1.0 - y).powi(alpha) * v.to_f64(),
            Err(e) => {
                failure = Some(e);
                0.0
            }
        }
    };
    let v = rule.integrate(&mut f, 0.0, 0.5 * x) + rule.integrate(&mut f, 0.5 * x, x);
    match failure {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// Quadrature value of `∂_θ^ℓ φ_i(x, θ)` at `θ = 0`, namely
/// `(n+β+1)_ℓ / (β+1)_ℓ ∫₀ˣ y^{β+i+ℓ−1} (1−y)^α dy`.
pub fn phi_derivative_oracle(i: usize, ell: usize, x: f64, d: &EffectiveDims) -> Result<f64> {
    check_row(i, d)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x must lie in [0, 1], got {x}")));
    }
    let alpha = d.alpha() as i32;
    let beta = d.beta() as f64;
    let a = (d.n + d.beta()) as f64 + 1.0;
    let s = beta + i as f64 + ell as f64;
    let rule = GaussLegendre::new(256);
    let f = |y: f64| y.powf(s - 1.0) * (1.0 - y).powi(alpha);
    let v = rule.integrate(f, 0.0, 0.5 * x) + rule.integrate(f, 0.5 * x, x);
    let mut ratio = 1.0;
    for k in 0..ell {
        ratio *= (a + k as f64) / (beta + 1.0 + k as f64);
    }
    Ok(ratio * v)
}

/// `𝒦_{m,n} = (n+β)!/β! ∏_{k=1}^{m−1} (p+n−k−1)! / ((n−k)! (m−k−1)! (p−k−1)!)`.
pub fn k_mn(d: &EffectiveDims) -> ScaledReal {
    let (m, n, p, beta) = (d.m as u64, d.n as u64, d.p as u64, d.beta() as u64);
    let mut k = factorial_ratio(n + beta, beta);
    for j in 1..m {
        k *= factorial_ratio(p + n - j - 1, n - j) / (factorial(m - j - 1) * factorial(p - j - 1));
    }
    k
}

/// `x` as a double-double from `t`, so that `1 − x = 1/(1+t)` keeps its digits.
pub(crate) fn wide_x(t: f64) -> DoubleDouble {
    let t = DoubleDouble::from(t);
    t / (t + DoubleDouble::ONE)
}

/// `h(s) = ₂F₁(−α, s; s+1; x) / s = x^{−s} ∫₀ˣ y^{s−1}(1−y)^α dy`, wide.
pub(crate) fn moment_kernel(alpha: usize, s: f64, x: DoubleDouble) -> Result<WideReal> {
    let f = hyp2f1_terminating_in::<DoubleDouble>(alpha as u32, s, s + 1.0, x)?;
    Ok(WideReal::from_mantissa(f / DoubleDouble::from(s)))
}
