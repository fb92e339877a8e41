use crate::error::{Error, Result};
use crate::linalg::{det_scaled, DenseMatrix};
use crate::specfun::{factorial_ratio, jacobi_p_in, DoubleDouble, WideReal};

use super::dims::{effective_dims, ModelDims};
use super::finalize;
use super::kernels::wide_x;

/// Null CDF `P(λ_max(S⁻¹R) ≤ t)` of the central F-matrix.
///
/// `𝒦 (n+p−1)!/(m+p−1)! x^{m(n+p−m)} det[Ψ_{i+1,j+1}(t)]_{i,j=1..α}` with
/// `Ψ_{I,J}(t) = (p+I−1)_{J−2} P_{m+I−J}^{(J−2, β+J−2)}(2/t + 1)`, a zero entry
/// when the degree is negative, and `𝒦 = ∏_{j<α} (p+m+j−1)!/(p+m+2j)!`.
/// The determinant is formed in double-double.
pub fn central_lmax_cdf(d: &ModelDims, t: f64) -> Result<f64> {
    let e = effective_dims(d)?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if t.is_infinite() {
        return Ok(1.0);
    }
    let (m, n, p, alpha, beta) = (e.m, e.n, e.p, e.alpha(), e.beta());
    let x = wide_x(t);
    let mut pref = factorial_ratio((n + p - 1) as u64, (m + p - 1) as u64);
    for j in 0..alpha {
        pref /= factorial_ratio((p + m + 2 * j) as u64, (p + m + j - 1) as u64);
    }
    let pref = pref.widen() * WideReal::from_mantissa(x).powi((m * (n + p - m)) as i64);
    if alpha == 0 {
        return finalize(pref.to_f64(), "central_lmax_cdf");
    }
    let z = DoubleDouble::from(2.0) / DoubleDouble::from(t) + DoubleDouble::ONE;
    let mat = DenseMatrix::from_fn(alpha, alpha, |i, j| {
        let (big_i, big_j) = (i + 2, j + 2);
        let deg = (m + big_i) as i64 - big_j as i64;
        if deg < 0 {
            return WideReal::zero();
        }
        let shift = big_j - 2;
        let mut poch = WideReal::one();
        for k in 0..shift {
            poch = poch.mul_mantissa(DoubleDouble::from((p + big_i - 1 + k) as f64));
        }
        poch * jacobi_p_in::<DoubleDouble>(deg as u32, shift as f64, (beta + shift) as f64, z)
    });
    let det = det_scaled(&mat)?;
    finalize((pref * det).to_f64(), "central_lmax_cdf")
}
