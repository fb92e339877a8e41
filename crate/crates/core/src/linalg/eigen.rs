use crate::error::{Error, Result};

use super::{DenseMatrix, Scalar};

/// Sweep limit for the cyclic Jacobi solver.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Dimension at or below which [`EigenMethod::Auto`] uses Jacobi rotations.
const AUTO_JACOBI_MAX_DIM: usize = 16;

/// Algorithm for the largest eigenvalue of a Hermitian matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EigenMethod {
    /// Jacobi for small matrices, tridiagonal bisection otherwise.
    #[default]
    Auto,
    /// Cyclic Jacobi rotations on the full matrix.
    Jacobi,
    /// Householder reduction to real tridiagonal form, then Sturm bisection.
    Tridiagonal,
}

/// All eigenvalues of a Hermitian matrix in ascending order, by cyclic Jacobi
/// rotations until the off-diagonal Frobenius norm is below `1e−12 ‖A‖_F`.
pub fn hermitian_eigenvalues<T: Scalar>(a: &DenseMatrix<T>) -> Result<Vec<f64>> {
    a.require_hermitian("hermitian_eigenvalues")?;
    let n = a.rows();
    let mut w = a.clone();
    let norm = a.frobenius_norm();
    let target = 1e-12 * norm;
    let off_norm = |w: &DenseMatrix<T>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += w[(i, j)].abs2();
                }
            }
        }
        s.sqrt()
    };
    let mut converged = off_norm(&w) <= target;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NonConvergence {
                what: "Jacobi eigensolver",
                max_terms: JACOBI_MAX_SWEEPS,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut w, p, q);
            }
        }
        converged = off_norm(&w) <= target;
    }
    let mut eig: Vec<f64> = (0..n).map(|i| w[(i, i)].re()).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Annihilates `w[p][q]` with a unitary plane rotation `V`, replacing `w` by `V† w V`.
fn rotate<T: Scalar>(w: &mut DenseMatrix<T>, p: usize, q: usize) {
    let apq = w[(p, q)];
    let g = apq.abs();
    if g == 0.0 {
        return;
    }
    let app = w[(p, p)].re();
    let aqq = w[(q, q)].re();
    let tau = (aqq - app) / (2.0 * g);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + tau.hypot(1.0))
    };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;
    let e = apq.scale(1.0 / g);
    let se = e.scale(s);
    let sec = se.conj();
    let n = w.rows();
    for k in 0..n {
        let akp = w[(k, p)];
        let akq = w[(k, q)];
        w[(k, p)] = akp.scale(c) - sec * akq;
        w[(k, q)] = se * akp + akq.scale(c);
    }
    for k in 0..n {
        let apk = w[(p, k)];
        let aqk = w[(q, k)];
        w[(p, k)] = apk.scale(c) - se * aqk;
        w[(q, k)] = sec * apk + aqk.scale(c);
    }
    w[(p, q)] = T::zero();
    w[(q, p)] = T::zero();
    w[(p, p)] = T::from_re(w[(p, p)].re());
    w[(q, q)] = T::from_re(w[(q, q)].re());
}

/// Largest eigenvalue of a Hermitian matrix by cyclic Jacobi rotations.
pub fn hermitian_eigen_max<T: Scalar>(a: &DenseMatrix<T>) -> Result<f64> {
    Ok(*hermitian_eigenvalues(a)?.last().expect("matrix has at least one row"))
}

/// Householder reduction of a Hermitian matrix to a real symmetric tridiagonal
/// matrix with the same spectrum. Returns the diagonal and the magnitudes of
/// the subdiagonal.
pub fn tridiagonalize<T: Scalar>(a: &DenseMatrix<T>) -> Result<(Vec<f64>, Vec<f64>)> {
    a.require_hermitian("tridiagonalize")?;
    let n = a.rows();
    let mut w = a.as_slice().to_vec();
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    let mut v = vec![T::zero(); n];
    let mut p = vec![T::zero(); n];
    for k in 0..n {
        diag.push(w[k * n + k].re());
        if k + 1 == n {
            break;
        }
        let r = n - k - 1;
        let base = k + 1;
        let x0 = w[base * n + k];
        let tail: f64 = (base + 1..n).map(|i| w[i * n + k].abs2()).sum();
        if tail == 0.0 {
            off.push(x0.abs());
            continue;
        }
        let xnorm = (x0.abs2() + tail).sqrt();
        let phase = if x0.abs() == 0.0 { T::one() } else { x0.scale(1.0 / x0.abs()) };
        let alpha = (-phase).scale(xnorm);
        off.push(xnorm);
        for (j, i) in (base..n).enumerate() {
            v[j] = w[i * n + k];
        }
        v[0] -= alpha;
        let vnorm = v[..r].iter().map(|z| z.abs2()).sum::<f64>().sqrt();
        let inv = 1.0 / vnorm;
        for z in v[..r].iter_mut() {
            *z = z.scale(inv);
        }
        // p = B v using the lower triangle of the trailing block B.
        for z in p[..r].iter_mut() {
            *z = T::zero();
        }
        for i in 0..r {
            let row = &w[(base + i) * n + base..(base + i) * n + base + i + 1];
            let vi = v[i];
            let mut acc = row[i] * vi;
            for j in 0..i {
                acc += row[j] * v[j];
                p[j] += row[j].conj() * vi;
            }
            p[i] += acc;
        }
        let mut kk = 0.0;
        for i in 0..r {
            kk += (v[i].conj() * p[i]).re();
        }
        for i in 0..r {
            p[i] -= v[i].scale(kk);
        }
        // B ← B − 2 v q† − 2 q v†, lower triangle only.
        for i in 0..r {
            let vi2 = v[i].scale(2.0);
            let qi2 = p[i].scale(2.0);
            let row = &mut w[(base + i) * n + base..(base + i) * n + base + i + 1];
            for j in 0..=i {
                row[j] -= vi2 * p[j].conj() + qi2 * v[j].conj();
            }
        }
    }
    Ok((diag, off))
}

/// Largest eigenvalue of the symmetric tridiagonal matrix `(diag, off)` by
/// Sturm-sequence bisection.
pub fn tridiagonal_max_eig(diag: &[f64], off: &[f64]) -> f64 {
    let n = diag.len();
    assert!(n >= 1 && off.len() + 1 == n);
    let radius = |i: usize| {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        left + right
    };
    let mut lo = (0..n).map(|i| diag[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..n).map(|i| diag[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * scale * scale);
    let off2: Vec<f64> = off.iter().map(|e| e * e).collect();
    // Number of eigenvalues strictly below x.
    let below = |x: f64| -> usize {
        let mut count = 0;
        let mut d = diag[0] - x;
        for i in 0..n {
            if i > 0 {
                d = diag[i] - x - off2[i - 1] / d;
            }
            if d.abs() < pivmin {
                d = -pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * scale {
            break;
        }
        if below(mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Largest eigenvalue of a Hermitian matrix by the chosen method.
pub fn largest_eigenvalue<T: Scalar>(a: &DenseMatrix<T>, method: EigenMethod) -> Result<f64> {
    let use_jacobi = match method {
        EigenMethod::Jacobi => true,
        EigenMethod::Tridiagonal => false,
        EigenMethod::Auto => a.rows() <= AUTO_JACOBI_MAX_DIM,
    };
    if use_jacobi {
        hermitian_eigen_max(a)
    } else {
        let (d, e) = tridiagonalize(a)?;
        Ok(tridiagonal_max_eig(&d, &e))
    }
}
