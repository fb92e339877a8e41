use num_complex::Complex64;

use super::DenseMatrix;

/// `G G†` for a complex `rows × cols` matrix, via real matrix products.
pub fn gram(g: &DenseMatrix<Complex64>) -> DenseMatrix<Complex64> {
    gram_shifted(g, None)
}

/// `(G + μ 1ᵀ)(G + μ 1ᵀ)†`: the Gram matrix after adding the column vector
/// `mu` to every column of `G`.
pub fn gram_shifted(g: &DenseMatrix<Complex64>, mu: Option<&[Complex64]>) -> DenseMatrix<Complex64> {
    let (m, n) = (g.rows(), g.cols());
    // W = [A | B] row-major (m × 2n) with G + μ1ᵀ = A + iB.
    let mut w = Vec::with_capacity(2 * m * n);
    for i in 0..m {
        let shift = mu.map_or(Complex64::new(0.0, 0.0), |v| v[i]);
        w.extend(g.row(i).iter().map(|z| z.re + shift.re));
        w.extend(g.row(i).iter().map(|z| z.im + shift.im));
    }
    // Re(GG†) = A Aᵀ + B Bᵀ = W Wᵀ; Im(GG†) = B Aᵀ − A Bᵀ = X − Xᵀ with X = B Aᵀ.
    let mut out_re = vec![0.0; m * m];
    let mut x = vec![0.0; m * m];
    let row_stride = (2 * n) as isize;
    // SAFETY: every operand lies inside `w` (m rows of stride 2n, k ≤ 2n
    // columns from the given offset) and the output is an m×m row-major buffer.
    unsafe {
        matrixmultiply::dgemm(
            m, 2 * n, m, 1.0,
            w.as_ptr(), row_stride, 1,
            w.as_ptr(), 1, row_stride,
            0.0, out_re.as_mut_ptr(), m as isize, 1,
        );
        matrixmultiply::dgemm(
            m, n, m, 1.0,
            w.as_ptr().add(n), row_stride, 1,
            w.as_ptr(), 1, row_stride,
            0.0, x.as_mut_ptr(), m as isize, 1,
        );
    }
    let out_im = |i: usize, j: usize| x[i * m + j] - x[j * m + i];
    let mut out = DenseMatrix::from_fn(m, m, |i, j| Complex64::new(out_re[i * m + j], out_im(i, j)));
    for i in 0..m {
        out[(i, i)].im = 0.0;
        for j in (i + 1)..m {
            out[(j, i)] = out[(i, j)].conj();
        }
    }
    out
}
