//! Scalar special functions and overflow-safe arithmetic.
//!
//! Every determinant entry of the CDFs in [`crate::fdist`] is built from the
//! functions here: factorial ratios, Pochhammer symbols, the confluent
//! `₁F₁`/`₂F₂` series, terminating Gauss `₂F₁` polynomials and Jacobi
//! polynomials. The Gaussian tail `Q` and a Gauss–Legendre rule serve the
//! asymptotic power formula and the quadrature oracles.

mod dd;
mod hypergeometric;
mod jacobi;
mod normal;
mod quadrature;
mod scaled;

use std::sync::OnceLock;


pub use dd::DoubleDouble;
pub use hypergeometric::{
    hyp1f1, hyp2f1_terminating, hyp2f2, hypergeometric_series, SeriesControl, SeriesOutcome,
};
pub(crate) use hypergeometric::hyp2f1_terminating_in;
pub use jacobi::jacobi_p;
pub(crate) use jacobi::jacobi_p_in;
pub use normal::q_function;
pub use quadrature::{gauss_legendre, GaussLegendre};
pub use scaled::{Mantissa, Scaled, ScaledReal, ScaledSum, WideReal};

const TABLE_LEN: usize = 256;

fn ln_factorial_table() -> &'static [f64; TABLE_LEN] {
    static TABLE: OnceLock<[f64; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Exact-to-double-double running product k!, kept near unit magnitude.
        const LN2_LO: f64 = 2.319_046_813_846_299_6e-17;
        let mut table = [0.0; TABLE_LEN];
        let mut prod = DoubleDouble::ONE;
        let mut exp2 = 0i32;
        for (k, slot) in table.iter_mut().enumerate().skip(1) {
            prod = prod.mul_f64(k as f64);
            let (_, e) = libm::frexp(prod.hi());
            prod = prod.ldexp(-e);
            exp2 += e;
            let e = f64::from(exp2);
            *slot = (prod.hi().ln() + prod.lo() / prod.hi()) + e * LN2_LO + e * std::f64::consts::LN_2;
        }
        table
    })
}

/// `ln(k!)`.
///
/// Tabulated below 256 (double-double cumulative sums), Stirling series above.
pub fn ln_factorial(k: u64) -> f64 {
    if (k as usize) < TABLE_LEN {
        return ln_factorial_table()[k as usize];
    }
    // ln Γ(z) with z = k + 1.
    let z = k as f64 + 1.0;
    let z2 = z * z;
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2)
        - 1.0 / (1680.0 * z * z2 * z2 * z2);
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

/// Rising factorial `(a)_k = a(a+1)⋯(a+k−1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: f64, k: u64) -> ScaledReal {
    let mut acc = ScaledReal::one();
    for i in 0..k {
        let f = a + i as f64;
        if f == 0.0 {
            return ScaledReal::zero();
        }
        acc = acc.mul_f64(f);
    }
    acc
}

/// `k!` as a [`ScaledReal`] (exact product, no overflow).
pub fn factorial(k: u64) -> ScaledReal {
    pochhammer(1.0, k)
}

/// `hi! / lo!` for `hi ≥ lo`, as the product `(lo+1)⋯hi`.
pub fn factorial_ratio(hi: u64, lo: u64) -> ScaledReal {
    debug_assert!(hi >= lo);
    pochhammer(lo as f64 + 1.0, hi - lo)
}
