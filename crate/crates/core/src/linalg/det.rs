use crate::error::{Error, Result};
use crate::specfun::{Mantissa, Scaled, ScaledReal};

use super::DenseMatrix;

/// Largest dimension accepted by the determinant kernels.
pub const MAX_DET_DIM: usize = 64;

/// Sign and log-magnitude of a determinant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogDet {
    pub sign: i8,
    pub ln_abs: f64,
}

impl LogDet {
    pub const ZERO: Self = Self {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn from_scaled<M: Mantissa>(v: Scaled<M>) -> Self {
        if v.is_zero() {
            return Self::ZERO;
        }
        Self {
            sign: if v.signum() < 0.0 { -1 } else { 1 },
            ln_abs: v.ln_abs(),
        }
    }

    pub fn to_scaled(self) -> ScaledReal {
        if self.sign == 0 {
            return ScaledReal::zero();
        }
        ScaledReal::from_ln(self.ln_abs, f64::from(self.sign))
    }

    pub fn value(self) -> f64 {
        self.to_scaled().to_f64()
    }
}

/// Determinant by LU with partial pivoting, carried in [`Scaled`] arithmetic.
///
/// Rows and columns are first equilibrated by exact powers of two (each row and
/// column brought to unit leading exponent); the removed exponents are added
/// back at the end. A zero pivot column yields an exact zero.
pub fn det_scaled<M: Mantissa>(a: &DenseMatrix<Scaled<M>>) -> Result<Scaled<M>> {
    if !a.is_square() {
        return Err(Error::InvalidDims(format!(
            "determinant of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n > MAX_DET_DIM {
        return Err(Error::InvalidDims(format!(
            "determinant dimension {n} exceeds {MAX_DET_DIM}"
        )));
    }
    let mut w: Vec<Scaled<M>> = a.as_slice().to_vec();
    let mut removed: i64 = 0;

    for j in 0..n {
        let e = (0..n)
            .filter(|&i| !w[i * n + j].is_zero())
            .map(|i| w[i * n + j].exponent())
            .max();
        match e {
            Some(e) => {
                removed += e;
                for i in 0..n {
                    w[i * n + j] = w[i * n + j].ldexp(-e);
                }
            }
            None => return Ok(Scaled::zero()),
        }
    }
    for i in 0..n {
        let row = &mut w[i * n..(i + 1) * n];
        let e = row.iter().filter(|v| !v.is_zero()).map(|v| v.exponent()).max();
        match e {
            Some(e) => {
                removed += e;
                for v in row.iter_mut() {
                    *v = v.ldexp(-e);
                }
            }
            None => return Ok(Scaled::zero()),
        }
    }

    let mut det = Scaled::<M>::one();
    for k in 0..n {
        let mut piv = k;
        let mut best = w[k * n + k].abs();
        for i in (k + 1)..n {
            let v = w[i * n + k].abs();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best.is_zero() {
            return Ok(Scaled::zero());
        }
        if piv != k {
            for j in 0..n {
                w.swap(k * n + j, piv * n + j);
            }
            det = -det;
        }
        let pivot = w[k * n + k];
        det *= pivot;
        let inv = pivot.recip();
        for i in (k + 1)..n {
            let f = w[i * n + k] * inv;
            if f.is_zero() {
                continue;
            }
            for j in (k + 1)..n {
                let t = f * w[k * n + j];
                w[i * n + j] -= t;
            }
        }
    }
    Ok(det.ldexp(removed))
}

/// [`LogDet`] of a matrix of extended-range entries.
pub fn det_log_scaled<M: Mantissa>(a: &DenseMatrix<Scaled<M>>) -> Result<LogDet> {
    det_scaled(a).map(LogDet::from_scaled)
}

/// [`LogDet`] of a real matrix.
pub fn det_log(a: &DenseMatrix<f64>) -> Result<LogDet> {
    det_log_scaled(&a.map(ScaledReal::from_f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{DoubleDouble, WideReal};
    use num_rational::BigRational;
    use num_traits::{One, Signed, ToPrimitive, Zero};
    use proptest::prelude::*;

    fn cofactor(m: &[Vec<BigRational>]) -> BigRational {
        let n = m.len();
        if n == 1 {
            return m[0][0].clone();
        }
        let mut acc = BigRational::zero();
        for j in 0..n {
            let minor: Vec<Vec<BigRational>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect())
                .collect();
            let term = m[0][j].clone() * cofactor(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    fn to_rational(a: &DenseMatrix<f64>) -> Vec<Vec<BigRational>> {
        (0..a.rows())
            .map(|i| a.row(i).iter().map(|&v| BigRational::from_float(v).unwrap()).collect())
            .collect()
    }

    #[test]
    fn identity_and_diagonal() {
        let d = det_log(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(d, LogDet { sign: 1, ln_abs: 0.0 });
        let d = det_log(&DenseMatrix::diagonal(&[2.0, 3.0])).unwrap();
        assert_eq!(d.sign, 1);
        assert!((d.ln_abs - 6f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn singular_gives_zero_sign() {
        let a = DenseMatrix::new(2, 2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert_eq!(det_log(&a).unwrap().sign, 0);
        let z = DenseMatrix::new(2, 2, vec![0.0, 1.0, 0.0, 3.0]).unwrap();
        assert_eq!(det_log(&z).unwrap(), LogDet::ZERO);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(det_log(&DenseMatrix::<f64>::zeros(2, 3)).is_err());
        assert!(det_log(&DenseMatrix::<f64>::identity(65)).is_err());
    }

    #[test]
    fn random_matches_cofactor_expansion() {
        let mut runner = proptest::test_runner::TestRunner::deterministic();
        let strat = proptest::collection::vec(-1.0f64..1.0, 25);
        for _ in 0..20 {
            use proptest::strategy::ValueTree;
            let v = strat.new_tree(&mut runner).unwrap().current();
            let a = DenseMatrix::new(5, 5, v).unwrap();
            let exact = cofactor(&to_rational(&a));
            let got = det_log(&a).unwrap();
            let e = exact.to_f64().unwrap();
            assert_eq!(f64::from(got.sign), e.signum());
            assert!(((got.ln_abs - e.abs().ln()) / e.abs().ln()).abs() < 1e-10);
            assert!(((got.value() - e) / e).abs() < 1e-12);
        }
    }

    #[test]
    fn extended_range_entries() {
        // diag(1e-400, 1e400) scaled by a rotation-like mix; determinant is exact.
        let tiny = ScaledReal::from_ln(-400.0 * 10f64.ln(), 1.0);
        let huge = ScaledReal::from_ln(800.0 * 10f64.ln(), 1.0);
        let a = DenseMatrix::new(2, 2, vec![tiny, huge, tiny.mul_f64(2.0), huge.mul_f64(3.0)]).unwrap();
        let d = det_log_scaled(&a).unwrap();
        // det = tiny*huge*(3 - 2).
        assert_eq!(d.sign, 1);
        assert!((d.ln_abs - 400.0 * 10f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn wide_hilbert_determinant() {
        let n = 10;
        let exact: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| BigRational::new(1.into(), ((i + j + 1) as i64).into())).collect())
            .collect();
        let det_exact = cofactor_fast(exact);
        let a = DenseMatrix::from_fn(n, n, |i, j| {
            WideReal::from_mantissa(DoubleDouble::ONE / DoubleDouble::from((i + j + 1) as f64))
        });
        let got = det_scaled(&a).unwrap();
        let m = got.mantissa();
        let pow = BigRational::from_integer(num_bigint::BigInt::one() << (-got.exponent()) as usize);
        let got_q = (BigRational::from_float(m.hi()).unwrap() + BigRational::from_float(m.lo()).unwrap()) / pow;
        let rel = ((got_q - &det_exact) / &det_exact).to_f64().unwrap();
        assert!(rel.abs() < 1e-20, "rel {rel}");
        // The same elimination in plain doubles loses most of its digits.
        let plain = det_log(&DenseMatrix::from_fn(n, n, |i, j| 1.0 / (i + j + 1) as f64)).unwrap();
        assert!((plain.ln_abs - ln_rational(&det_exact)).abs() > 1e-10);
    }

    /// Exact rational Gaussian elimination.
    fn cofactor_fast(mut m: Vec<Vec<BigRational>>) -> BigRational {
        let n = m.len();
        let mut det = BigRational::one();
        for k in 0..n {
            let p = (k..n).find(|&i| !m[i][k].is_zero()).unwrap();
            if p != k {
                m.swap(p, k);
                det = -det;
            }
            det *= m[k][k].clone();
            for i in (k + 1)..n {
                let f = m[i][k].clone() / m[k][k].clone();
                for j in k..n {
                    let t = f.clone() * m[k][j].clone();
                    m[i][j] -= t;
                }
            }
        }
        det
    }

    fn ln_rational(q: &BigRational) -> f64 {
        let (n, d) = (q.numer().abs(), q.denom().clone());
        let ln = |v: &num_bigint::BigInt| {
            let bits = v.bits();
            let shift = bits.saturating_sub(60);
            (v >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
        };
        ln(&n) - ln(&d)
    }

    proptest! {
        #[test]
        fn product_rule(n in 1usize..=8, seed in proptest::collection::vec(-1.0f64..1.0, 128)) {
            let a = DenseMatrix::from_fn(n, n, |i, j| seed[i * n + j] + if i == j { 1.5 } else { 0.0 });
            let b = DenseMatrix::from_fn(n, n, |i, j| seed[64 + i * n + j]);
            let ab = a.matmul(&b).unwrap();
            let (da, db, dab) = (det_log(&a).unwrap(), det_log(&b).unwrap(), det_log(&ab).unwrap());
            prop_assume!(db.sign != 0 && db.ln_abs > -20.0);
            prop_assert_eq!(da.sign * db.sign, dab.sign);
            prop_assert!((da.ln_abs + db.ln_abs - dab.ln_abs).abs() < 1e-10 * (1.0 + dab.ln_abs.abs()));
        }
    }
}
