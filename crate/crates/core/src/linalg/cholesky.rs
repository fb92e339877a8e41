use crate::error::{Error, Result};

use super::eigen::{largest_eigenvalue, EigenMethod};
use super::{DenseMatrix, Scalar};

/// Lower-triangular `L` with `L L† = A`.
pub fn cholesky<T: Scalar>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    a.require_hermitian("cholesky")?;
    let n = a.rows();
    let mut l = DenseMatrix::<T>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re();
        for k in 0..j {
            d -= l[(j, k)].abs2();
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = T::from_re(djj);
        let inv = 1.0 / djj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            let (ri, rj) = (&l.as_slice()[i * n..i * n + j], &l.as_slice()[j * n..j * n + j]);
            for k in 0..j {
                s -= ri[k] * rj[k].conj();
            }
            l[(i, j)] = s.scale(inv);
        }
    }
    Ok(l)
}

/// Solves `L X = B` for lower-triangular `L` by forward substitution on rows.
pub fn lower_solve<T: Scalar>(l: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let n = l.rows();
    if !l.is_square() || b.rows() != n {
        return Err(Error::InvalidDims(format!(
            "lower_solve with L {}x{} and B {}x{}",
            l.rows(),
            l.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let c = b.cols();
    let mut x = b.clone();
    let data = x.as_mut_slice();
    for i in 0..n {
        let (done, rest) = data.split_at_mut(i * c);
        let xi = &mut rest[..c];
        for k in 0..i {
            let lik = l[(i, k)];
            if lik == T::zero() {
                continue;
            }
            let xk = &done[k * c..(k + 1) * c];
            for (v, &w) in xi.iter_mut().zip(xk) {
                *v -= lik * w;
            }
        }
        let inv = 1.0 / l[(i, i)].re();
        for v in xi.iter_mut() {
            *v = v.scale(inv);
        }
    }
    Ok(x)
}

/// `L⁻¹ R L⁻†` with `L = cholesky(S)`, symmetrized.
pub fn whiten<T: Scalar>(s: &DenseMatrix<T>, r: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    r.require_hermitian("whiten")?;
    if s.rows() != r.rows() {
        return Err(Error::InvalidDims(format!(
            "whiten with S {}x{} and R {}x{}",
            s.rows(),
            s.cols(),
            r.rows(),
            r.cols()
        )));
    }
    let l = cholesky(s)?;
    let x = lower_solve(&l, r)?;
    let mut c = lower_solve(&l, &x.adjoint())?;
    let n = c.rows();
    for i in 0..n {
        c[(i, i)] = T::from_re(c[(i, i)].re());
        for j in (i + 1)..n {
            let avg = (c[(i, j)] + c[(j, i)].conj()).scale(0.5);
            c[(i, j)] = avg;
            c[(j, i)] = avg.conj();
        }
    }
    Ok(c)
}

/// `λ_max(S⁻¹ R)` through the whitened matrix `L⁻¹ R L⁻†`, clamped at zero.
pub fn whitened_max_eig<T: Scalar>(s: &DenseMatrix<T>, r: &DenseMatrix<T>) -> Result<f64> {
    whitened_max_eig_with(s, r, EigenMethod::Auto)
}

pub(crate) fn whitened_max_eig_with<T: Scalar>(
    s: &DenseMatrix<T>,
    r: &DenseMatrix<T>,
    method: EigenMethod,
) -> Result<f64> {
    let c = whiten(s, r)?;
    Ok(largest_eigenvalue(&c, method)?.max(0.0))
}
