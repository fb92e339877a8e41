use super::scaled::{Mantissa, Scaled, ScaledReal};

/// Jacobi polynomial `P_deg^{(a,b)}(z)` by the three-term recurrence in degree.
///
/// Intended for `z ≥ 1` and `a, b > −1`, where every `P_k` is positive and the
/// recurrence is forward-stable.
pub fn jacobi_p(deg: u32, a: f64, b: f64, z: f64) -> ScaledReal {
    jacobi_p_in::<f64>(deg, a, b, z)
}

pub(crate) fn jacobi_p_in<M: Mantissa>(deg: u32, a: f64, b: f64, z: M) -> Scaled<M> {
    let one = Scaled::<M>::one();
    if deg == 0 {
        return one;
    }
    let half = M::from_f64(0.5);
    let p1 = M::from_f64(a - b) * half + M::from_f64(a + b + 2.0) * half * z;
    let mut prev = one;
    let mut cur = Scaled::from_mantissa(p1);
    let ab = a + b;
    let diff2 = M::from_f64(a * a - b * b);
    for n in 2..=deg {
        let nf = f64::from(n);
        let s = 2.0 * nf + ab;
        let d = M::from_f64(2.0 * nf * (nf + ab)) * M::from_f64(s - 2.0);
        let c1 = M::from_f64(s - 1.0) * (M::from_f64(s * (s - 2.0)) * z + diff2);
        let c2 = M::from_f64(2.0 * (nf + a - 1.0) * (nf + b - 1.0) * s);
        let next = (cur.mul_mantissa(c1) - prev.mul_mantissa(c2)).mul_mantissa(M::one() / d);
        prev = cur;
        cur = next;
    }
    cur
}
