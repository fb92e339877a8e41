//! Sampling oracle: complex Wishart pairs in the canonical identity-noise
//! frame, the leading eigenvalue of `S⁻¹R`, empirical CDFs and end-to-end
//! detection experiments.
//!
//! Every trial draws from its own ChaCha20 stream keyed by the trial index,
//! so results are bit-identical for any thread count or scheduling.

mod ecdf;
mod rng;
mod sampler;

use rayon::prelude::*;

use crate::asymptotic::{edge_params, standardize_stat, HighDimParams, Tw2Table};
use crate::detector::DetectorConfig;
use crate::error::{Error, Result};
use crate::fdist::ModelDims;

pub use ecdf::EmpiricalCdf;
pub use rng::RngSpec;
pub use sampler::{complex_gaussian, sample_lmax, sample_lmax_with, LmaxSample, SampleOptions, Statistic};

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    Ok(())
}

/// `trials` draws, trial `i` on stream `rng.trial(i)`, collected in index order.
pub fn sample_many(
    d: &ModelDims,
    theta: f64,
    trials: usize,
    rng: &RngSpec,
    opts: &SampleOptions,
) -> Result<Vec<LmaxSample>> {
    check_trials(trials)?;
    (0..trials as u64)
        .into_par_iter()
        .map(|i| sample_lmax_with(d, theta, &rng.trial(i), opts))
        .collect()
}

pub fn empirical_cdf(d: &ModelDims, theta: f64, trials: usize, rng: &RngSpec, which: Statistic) -> Result<EmpiricalCdf> {
    empirical_cdf_with(d, theta, trials, rng, which, &SampleOptions::default())
}

pub fn empirical_cdf_with(
    d: &ModelDims,
    theta: f64,
    trials: usize,
    rng: &RngSpec,
    which: Statistic,
    opts: &SampleOptions,
) -> Result<EmpiricalCdf> {
    let draws = sample_many(d, theta, trials, rng, opts)?;
    EmpiricalCdf::new(draws.iter().map(|s| s.get(which)).collect())
}

/// Empirical false-alarm and detection rates of `λ̂_max > ξ_th`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectionEstimate {
    pub pf_hat: f64,
    pub pd_hat: f64,
    pub trials: usize,
}

/// H₀ draws (`θ = 0`) come from `rng.child(0)`, H₁ draws (`θ = γ`) from `rng.child(1)`.
pub fn detection_experiment(cfg: &DetectorConfig, xi_th: f64, trials: usize, rng: &RngSpec) -> Result<DetectionEstimate> {
    if !(xi_th >= 0.0) {
        return Err(Error::InvalidArgument(format!("threshold must be >= 0, got {xi_th}")));
    }
    let rate = |theta: f64, spec: RngSpec| -> Result<f64> {
        let e = empirical_cdf(&cfg.dims, theta, trials, &spec, Statistic::Rescaled)?;
        Ok(e.exceedance(xi_th))
    };
    Ok(DetectionEstimate {
        pf_hat: rate(0.0, rng.child(0))?,
        pd_hat: rate(cfg.gamma, rng.child(1))?,
        trials,
    })
}

/// Finite dimensions used for a high-dimensional run: `n = round(m/c₂)`,
/// `p = round(m/c₁)`.
pub fn highdim_dims(h: &HighDimParams, m: usize) -> Result<ModelDims> {
    h.validate()?;
    if m == 0 {
        return Err(Error::InvalidDims("m must be positive".into()));
    }
    let n = (m as f64 / h.c2).round() as usize;
    let p = (m as f64 / h.c1).round() as usize;
    ModelDims::new(m, n, p)
}

/// Result of [`highdim_experiment`].
#[derive(Clone, Debug)]
pub struct HighDimOutcome {
    pub dims: ModelDims,
    pub theta: f64,
    /// `t_th = F₂⁻¹(1 − α)`.
    pub t_threshold: f64,
    /// Fraction of trials with `t > t_th`.
    pub empirical_power: f64,
    /// Standardized statistics `t = m^{2/3}(λ̂_max − μ)/σ₀`.
    pub t_samples: EmpiricalCdf,
    /// Raw `λ̂_max` samples.
    pub lambda_hat: EmpiricalCdf,
}

/// Runs trials at `θ = p γ̄` and applies the Tracy–Widom-calibrated test.
pub fn highdim_experiment(h: &HighDimParams, m: usize, trials: usize, alpha: f64, rng: &RngSpec) -> Result<HighDimOutcome> {
    highdim_experiment_with(h, m, trials, alpha, rng, Tw2Table::bundled())
}

pub fn highdim_experiment_with(
    h: &HighDimParams,
    m: usize,
    trials: usize,
    alpha: f64,
    rng: &RngSpec,
    table: &Tw2Table,
) -> Result<HighDimOutcome> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let dims = highdim_dims(h, m)?;
    let e = edge_params(h)?;
    let theta = dims.p as f64 * h.gamma_bar;
    let lambda_hat = empirical_cdf(&dims, theta, trials, rng, Statistic::Rescaled)?;
    let t: Vec<f64> = lambda_hat.samples().iter().map(|&l| standardize_stat(l, m, &e)).collect();
    let t_samples = EmpiricalCdf::new(t)?;
    let t_threshold = table.quantile(1.0 - alpha);
    Ok(HighDimOutcome {
        dims,
        theta,
        t_threshold,
        empirical_power: t_samples.exceedance(t_threshold),
        t_samples,
        lambda_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::{pd, threshold_for_pfa};
    use crate::fdist::central_lmax_cdf;
    use crate::linalg::DenseMatrix;
    use num_complex::Complex64;
    use rand::Rng;

    #[test]
    fn scalar_central_law() {
        // m = n = p = 1: F(t) = t/(1+t).
        let d = ModelDims::new(1, 1, 1).unwrap();
        let e = empirical_cdf(&d, 0.0, 10_000, &RngSpec::new(11, 0), Statistic::Raw).unwrap();
        let ks = e.ks_distance(|t| t / (1.0 + t));
        assert!(ks <= 0.02, "{ks}");
    }

    #[test]
    fn single_trial_and_zero_trials() {
        let d = ModelDims::new(2, 3, 2).unwrap();
        let e = empirical_cdf(&d, 1.0, 1, &RngSpec::new(0, 0), Statistic::Raw).unwrap();
        assert_eq!(e.count(), 1);
        assert!(empirical_cdf(&d, 1.0, 0, &RngSpec::new(0, 0), Statistic::Raw).is_err());
    }

    #[test]
    fn independent_of_thread_count() {
        let d = ModelDims::new(3, 6, 4).unwrap();
        let spec = RngSpec::new(5, 1);
        let many = empirical_cdf(&d, 3.0, 300, &spec, Statistic::Rescaled).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let single = one.install(|| empirical_cdf(&d, 3.0, 300, &spec, Statistic::Rescaled).unwrap());
        assert_eq!(many, single);
    }

    #[test]
    fn signal_shifts_the_mean_up() {
        let d = ModelDims::new(4, 8, 6).unwrap();
        let h0 = empirical_cdf(&d, 0.0, 10_000, &RngSpec::new(3, 0), Statistic::Raw).unwrap();
        let h1 = empirical_cdf(&d, 50.0, 10_000, &RngSpec::new(3, 1), Statistic::Raw).unwrap();
        assert!(h1.mean() > h0.mean());
    }

    #[test]
    fn matches_central_cdf_small() {
        let d = ModelDims::new(2, 4, 3).unwrap();
        let trials = 5000;
        let e = empirical_cdf(&d, 0.0, trials, &RngSpec::new(21, 0), Statistic::Raw).unwrap();
        let ks = e.try_ks_distance(|t| central_lmax_cdf(&d, t)).unwrap();
        assert!(ks <= 1.36 / (trials as f64).sqrt() + 0.005, "{ks}");
    }

    #[test]
    fn detection_extremes_and_consistency() {
        let cfg = DetectorConfig::new(ModelDims::new(2, 4, 3).unwrap(), 10.0).unwrap();
        let spec = RngSpec::new(8, 0);
        let zero = detection_experiment(&cfg, 0.0, 200, &spec).unwrap();
        assert_eq!((zero.pf_hat, zero.pd_hat), (1.0, 1.0));
        let huge = detection_experiment(&cfg, 1e6, 200, &spec).unwrap();
        assert_eq!(huge.pf_hat, 0.0);
        assert!(huge.pd_hat < 0.01);
        let xi = threshold_for_pfa(&cfg.dims, 0.2).unwrap();
        let est = detection_experiment(&cfg, xi, 4000, &spec).unwrap();
        let sd = (0.2f64 * 0.8 / 4000.0).sqrt();
        assert!((est.pf_hat - 0.2).abs() < 4.0 * sd, "{est:?}");
        let want = pd(&cfg, xi).unwrap();
        assert!((est.pd_hat - want).abs() < 4.0 * (want * (1.0 - want) / 4000.0).sqrt() + 1e-3, "{est:?} vs {want}");
    }

    fn random_unitary_column(m: usize, seed: u64) -> Vec<Complex64> {
        let mut gen = RngSpec::new(seed, 99).rng();
        let v = complex_gaussian(m, 1, &mut gen).into_vec();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|z| z / norm).collect()
    }

    #[test]
    fn frame_invariances() {
        let d = ModelDims::new(3, 6, 4).unwrap();
        let trials = 10_000;
        let base = empirical_cdf(&d, 8.0, trials, &RngSpec::new(1, 0), Statistic::Raw).unwrap();
        let moved = SampleOptions { mean_direction: Some(random_unitary_column(3, 4)), noise_factor: None };
        let e1 = empirical_cdf_with(&d, 8.0, trials, &RngSpec::new(2, 0), Statistic::Raw, &moved).unwrap();
        assert!(base.ks_two_sample(&e1) <= 0.02);
        let mut gen = RngSpec::new(7, 7).rng();
        let l = DenseMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                Complex64::new(0.5 + gen.random::<f64>() * 3.0, 0.0)
            } else if j < i {
                Complex64::new(gen.random::<f64>() - 0.5, gen.random::<f64>() - 0.5)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let colored = SampleOptions { mean_direction: None, noise_factor: Some(l) };
        let e2 = empirical_cdf_with(&d, 8.0, trials, &RngSpec::new(3, 0), Statistic::Raw, &colored).unwrap();
        assert!(base.ks_two_sample(&e2) <= 0.02);
    }

    #[test]
    fn highdim_dimensions() {
        let h = HighDimParams::new(0.25, 0.5, 5.0).unwrap();
        assert_eq!(highdim_dims(&h, 200).unwrap(), ModelDims::new(200, 400, 800).unwrap());
        let h = HighDimParams::new(0.3, 0.7, 0.0).unwrap();
        assert_eq!(highdim_dims(&h, 10).unwrap(), ModelDims::new(10, 14, 33).unwrap());
        let small = highdim_experiment(&HighDimParams::new(0.25, 0.5, 5.0).unwrap(), 8, 50, 0.05, &RngSpec::new(0, 0)).unwrap();
        assert_eq!(small.t_samples.count(), 50);
        assert_eq!(small.theta, 160.0);
        assert!(highdim_experiment(&h, 8, 10, 1.0, &RngSpec::new(0, 0)).is_err());
    }
}
