use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fdist::ModelDims;
use crate::linalg::{gram, gram_shifted, whitened_max_eig, DenseMatrix};

use super::RngSpec;

/// One draw of the leading eigenvalue: `λ_max(S⁻¹R)` and `λ̂_max = (n/p) λ_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LmaxSample {
    pub lambda_max: f64,
    pub lambda_hat_max: f64,
}

/// Which of the two eigenvalue statistics to collect.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Statistic {
    /// `λ_max(S⁻¹R)`.
    Raw,
    /// `λ̂_max = (n/p) λ_max(S⁻¹R)`, the detector statistic.
    Rescaled,
}

impl LmaxSample {
    pub fn get(&self, which: Statistic) -> f64 {
        match which {
            Statistic::Raw => self.lambda_max,
            Statistic::Rescaled => self.lambda_hat_max,
        }
    }
}

/// Departures from the canonical frame, used to spot-check invariances.
#[derive(Clone, Debug, Default)]
pub struct SampleOptions {
    /// Unit vector carrying the mean; `e₁` when absent.
    pub mean_direction: Option<Vec<Complex64>>,
    /// Factor `L` of a noise covariance `Σ = LL†` applied to both draws.
    pub noise_factor: Option<DenseMatrix<Complex64>>,
}

impl SampleOptions {
    fn validate(&self, m: usize) -> Result<()> {
        if let Some(u) = &self.mean_direction {
            let norm2: f64 = u.iter().map(|z| z.norm_sqr()).sum();
            if u.len() != m || (norm2 - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "mean direction must be a unit vector of length {m}"
                )));
            }
        }
        if let Some(l) = &self.noise_factor {
            if l.rows() != m || l.cols() != m {
                return Err(Error::InvalidDims(format!("noise factor must be {m}x{m}")));
            }
        }
        Ok(())
    }
}

/// `rows × cols` matrix of independent `CN(0, 1)` entries (real and imaginary
/// parts each of variance 1/2), filled row by row.
pub fn complex_gaussian<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> DenseMatrix<Complex64> {
    DenseMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

fn check(d: &ModelDims, theta: f64) -> Result<()> {
    d.validate()?;
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::InvalidArgument(format!("theta must be finite and >= 0, got {theta}")));
    }
    Ok(())
}

/// Draws `S = G_n G_n†` and `R = (M + G_p)(M + G_p)†` with every column of
/// `M` equal to `√(θ/p) e₁`, then returns the leading eigenvalue of `S⁻¹R`.
pub fn sample_lmax(d: &ModelDims, theta: f64, rng: &RngSpec) -> Result<LmaxSample> {
    sample_lmax_with(d, theta, rng, &SampleOptions::default())
}

pub fn sample_lmax_with(d: &ModelDims, theta: f64, rng: &RngSpec, opts: &SampleOptions) -> Result<LmaxSample> {
    check(d, theta)?;
    opts.validate(d.m)?;
    let mut gen = rng.rng();
    let gn = complex_gaussian(d.m, d.n, &mut gen);
    let gp = complex_gaussian(d.m, d.p, &mut gen);
    let scale = (theta / d.p as f64).sqrt();
    let mu: Vec<Complex64> = match &opts.mean_direction {
        Some(u) => u.iter().map(|z| z * scale).collect(),
        None => (0..d.m).map(|i| Complex64::new(if i == 0 { scale } else { 0.0 }, 0.0)).collect(),
    };
    let mut s = gram(&gn);
    let mut r = if theta > 0.0 { gram_shifted(&gp, Some(&mu)) } else { gram(&gp) };
    if let Some(l) = &opts.noise_factor {
        let lh = l.adjoint();
        s = l.matmul(&s)?.matmul(&lh)?;
        r = l.matmul(&r)?.matmul(&lh)?;
    }
    let lambda_max = whitened_max_eig(&s, &r)?;
    Ok(LmaxSample {
        lambda_max,
        lambda_hat_max: d.n as f64 / d.p as f64 * lambda_max,
    })
}
