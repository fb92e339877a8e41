/// Gaussian tail `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gauss_legendre;

    fn density(u: f64) -> f64 {
        (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt()
    }

    /// Tail by composite Gauss–Legendre on unit panels out to x + 40.
    fn tail_by_quadrature(x: f64) -> f64 {
        (0..80)
            .map(|k| {
                let lo = x + 0.5 * k as f64;
                gauss_legendre(density, lo, lo + 0.5, 20)
            })
            .sum()
    }

    #[test]
    fn symmetry_point_and_tail() {
        assert_eq!(q_function(0.0), 0.5);
        assert!(q_function(40.0) < 1e-300);
        assert!((q_function(-40.0) - 1.0).abs() < 1e-16);
    }

    #[test]
    fn five_percent_point() {
        assert!((q_function(1.644_853_626_951_472_2) - 0.05).abs() < 1e-13);
    }

    #[test]
    fn matches_quadrature() {
        for &x in &[-3.0, -1.0, 0.3, 1.0, 2.5, 5.0, 7.0] {
            let q = q_function(x);
            let o = tail_by_quadrature(x);
            assert!((q - o).abs() < 1e-13, "x={x}: {q} vs {o}");
        }
        for &x in &[8.0, 12.0] {
            let q = q_function(x);
            let o = tail_by_quadrature(x);
            assert!(((q - o) / o).abs() < 1e-10, "x={x}: {q} vs {o}");
        }
    }

    #[test]
    fn complement() {
        for i in -50..=50 {
            let x = f64::from(i) * 0.13;
            assert!((q_function(x) + q_function(-x) - 1.0).abs() < 1e-15);
        }
    }
}
