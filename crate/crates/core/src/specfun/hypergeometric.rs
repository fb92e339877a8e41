use crate::error::{Error, Result};

use super::scaled::{Mantissa, ScaledReal, ScaledSum};

/// Truncation control for ascending hypergeometric series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            max_terms: 20_000,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || max_terms == 0 {
            return Err(Error::InvalidArgument(format!(
                "series control needs rel_tol > 0 and max_terms >= 1 (got {rel_tol}, {max_terms})"
            )));
        }
        Ok(Self { rel_tol, max_terms })
    }
}

/// Result of summing a series, with the uncompensated sum kept for diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct SeriesOutcome {
    pub value: ScaledReal,
    pub naive: ScaledReal,
    pub terms: usize,
}

/// Number of consecutive negligible terms required before stopping.
const QUIET_TERMS: usize = 3;

/// Generic `pFq(upper; lower; x)` by its ascending series.
///
/// Terms are carried as [`ScaledReal`] and accumulated with compensation. The
/// series stops once `|term| / |partial sum| < rel_tol` for three consecutive
/// terms, or exactly when a nonpositive-integer upper parameter terminates it.
pub fn hypergeometric_series(
    upper: &[f64],
    lower: &[f64],
    x: f64,
    ctl: &SeriesControl,
    what: &'static str,
) -> Result<SeriesOutcome> {
    let mut sum = ScaledSum::<f64>::new();
    let mut term = ScaledReal::one();
    sum.add(term);
    if x == 0.0 {
        return Ok(SeriesOutcome {
            value: sum.value(),
            naive: sum.naive(),
            terms: 1,
        });
    }
    let mut quiet = 0;
    for k in 0..ctl.max_terms {
        let kf = k as f64;
        let mut ratio = x / (kf + 1.0);
        for &a in upper {
            ratio *= a + kf;
        }
        for &b in lower {
            let d = b + kf;
            if d == 0.0 {
                return Err(Error::Domain(format!(
                    "{what}: lower parameter {b} reaches zero at term {k}"
                )));
            }
            ratio /= d;
        }
        term = term.mul_f64(ratio);
        if term.is_zero() {
            return Ok(SeriesOutcome {
                value: sum.value(),
                naive: sum.naive(),
                terms: k + 1,
            });
        }
        sum.add(term);
        let rel = (term / sum.value()).to_f64().abs();
        if rel < ctl.rel_tol {
            quiet += 1;
            if quiet >= QUIET_TERMS {
                return Ok(SeriesOutcome {
                    value: sum.value(),
                    naive: sum.naive(),
                    terms: k + 2,
                });
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence {
        what,
        max_terms: ctl.max_terms,
    })
}

/// Kummer's confluent hypergeometric function `₁F₁(a; b; x)`.
///
/// Negative arguments go through Kummer's transformation
/// `₁F₁(a; b; x) = eˣ ₁F₁(b−a; b; −x)` so the summed series has positive terms.
pub fn hyp1f1(a: f64, b: f64, x: f64, ctl: &SeriesControl) -> Result<ScaledReal> {
    if x < 0.0 {
        let inner = hypergeometric_series(&[b - a], &[b], -x, ctl, "1F1")?;
        return Ok(inner.value * ScaledReal::exp(x));
    }
    Ok(hypergeometric_series(&[a], &[b], x, ctl, "1F1")?.value)
}

/// Generalized hypergeometric `₂F₂(a1, a2; b1, b2; x)`.
pub fn hyp2f2(a1: f64, a2: f64, b1: f64, b2: f64, x: f64, ctl: &SeriesControl) -> Result<ScaledReal> {
    Ok(hypergeometric_series(&[a1, a2], &[b1, b2], x, ctl, "2F2")?.value)
}

/// Terminating Gauss function `₂F₁(−alpha, b; c; x)`, a polynomial of degree `alpha` in `x`.
pub fn hyp2f1_terminating(alpha: u32, b: f64, c: f64, x: f64) -> Result<f64> {
    hyp2f1_terminating_in::<f64>(alpha, b, c, x)
}

/// [`hyp2f1_terminating`] in any mantissa precision.
///
/// For `0 < x < 1` and `c > b > 0` the Pfaff form
/// `(1−x)^α ₂F₁(−α, c−b; c; x/(x−1))` is summed instead; all of its terms are
/// positive, so nothing cancels as `x → 1`.
pub(crate) fn hyp2f1_terminating_in<M: Mantissa>(alpha: u32, b: f64, c: f64, x: M) -> Result<M> {
    for j in 0..alpha {
        if c + f64::from(j) == 0.0 {
            return Err(Error::Domain(format!(
                "2F1(-{alpha}, {b}; {c}; x): lower parameter reaches zero"
            )));
        }
    }
    let one = M::one();
    let xf = x.to_f64();
    let pfaff = xf > 0.0 && xf < 1.0 && b > 0.0 && c > b;
    let (upper, z) = if pfaff {
        (c - b, x / (x - one))
    } else {
        (b, x)
    };
    let mut term = one;
    let mut sum = one;
    let mut comp = M::zero();
    for k in 0..alpha {
        let kf = f64::from(k);
        // Numerator and denominator are exact for integer parameters; divide in M.
        let num = M::from_f64(kf - f64::from(alpha)) * M::from_f64(upper + kf);
        let den = M::from_f64(c + kf) * M::from_f64(kf + 1.0);
        term = term * (num / den) * z;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    let mut value = sum + comp;
    if pfaff {
        let w = one - x;
        for _ in 0..alpha {
            value *= w;
        }
    }
    Ok(value)
}
