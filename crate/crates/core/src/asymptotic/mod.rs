//! High-dimensional approximations for `m, n, p → ∞` with `m/p → c₁` and
//! `m/n → c₂`: Tracy–Widom centering and scaling of `λ̂_max` under the null,
//! the phase transition, and the Gaussian spike law above it.

mod tw2;

use crate::error::{Error, Result};
use crate::specfun::q_function;

pub use tw2::{tw2_cdf, tw2_quantile, Tw2Table};

/// Limiting ratios `c₁ = m/p`, `c₂ = m/n` and signal strength `γ̄ = s†A†Σ⁻¹As`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HighDimParams {
    pub c1: f64,
    pub c2: f64,
    pub gamma_bar: f64,
}

impl HighDimParams {
    pub fn new(c1: f64, c2: f64, gamma_bar: f64) -> Result<Self> {
        let h = Self { c1, c2, gamma_bar };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        let open = |v: f64| v > 0.0 && v < 1.0;
        if !open(self.c1) || !open(self.c2) {
            return Err(Error::InvalidArgument(format!(
                "c1 and c2 must lie in (0, 1), got c1={}, c2={}",
                self.c1, self.c2
            )));
        }
        if !(self.gamma_bar >= 0.0) || !self.gamma_bar.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "gamma_bar must be finite and >= 0, got {}",
                self.gamma_bar
            )));
        }
        Ok(())
    }
}

/// Null edge: `λ̂_max ≈ μ + m^{−2/3} σ₀ TW₂`, and the phase transition `γ̄_p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeParams {
    pub r: f64,
    pub mu: f64,
    pub sigma0: f64,
    pub gamma_p: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpikeRegime {
    Subcritical,
    Supercritical,
}

/// Spike law above the transition: `λ̂_max ≈ ν + m^{−1/2} σ₁ Z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpikeParams {
    pub regime: SpikeRegime,
    gamma_bar: f64,
    gamma_p: f64,
    nu: f64,
    sigma1: f64,
}

impl SpikeParams {
    fn require_supercritical(&self) -> Result<()> {
        match self.regime {
            SpikeRegime::Supercritical => Ok(()),
            SpikeRegime::Subcritical => Err(Error::SubcriticalRequest {
                gamma_bar: self.gamma_bar,
                gamma_p: self.gamma_p,
            }),
        }
    }

    pub fn nu(&self) -> Result<f64> {
        self.require_supercritical()?;
        Ok(self.nu)
    }

    pub fn sigma1(&self) -> Result<f64> {
        self.require_supercritical()?;
        Ok(self.sigma1)
    }
}

pub fn edge_params(h: &HighDimParams) -> Result<EdgeParams> {
    h.validate()?;
    let (c1, c2) = (h.c1, h.c2);
    let r = (c1 + c2 - c1 * c2).sqrt();
    let mu = ((1.0 + r) / (1.0 - c2)).powi(2);
    let num = c1.powi(4) * (c1 + r).powi(4) * (c1 + c2).powi(4);
    let den = r * ((c1 + c2).powi(2) - c2 * (c1 + r).powi(2)).powi(4);
    let sigma0 = (num / den).cbrt();
    let gamma_p = (c2 + r) / (1.0 - c2);
    Ok(EdgeParams { r, mu, sigma0, gamma_p })
}

/// Classifies `γ̄` against `γ̄_p` (equality counts as subcritical) and, above
/// the transition, evaluates `ν` and `σ₁`.
pub fn spike_params(h: &HighDimParams) -> Result<SpikeParams> {
    let e = edge_params(h)?;
    let (c1, c2, g) = (h.c1, h.c2, h.gamma_bar);
    let regime = if g > e.gamma_p {
        SpikeRegime::Supercritical
    } else {
        SpikeRegime::Subcritical
    };
    let (mut nu, mut sigma1) = (f64::NAN, f64::NAN);
    if regime == SpikeRegime::Supercritical {
        nu = (g + c1) * (1.0 + g) / (g - (1.0 + g) * c2);
        // Auxiliary `t²` of the variance formula (not the test statistic).
        let t_aux_sq = c1 + c2 - c1 * (g * g - c1) / (1.0 + g).powi(2);
        let var = t_aux_sq * g * g * (1.0 + g).powi(2) * (g * g - c2 * (1.0 + g).powi(2) - c1)
            / (c2 - g + c2 * g).powi(4);
        sigma1 = var.sqrt();
    }
    Ok(SpikeParams {
        regime,
        gamma_bar: g,
        gamma_p: e.gamma_p,
        nu,
        sigma1,
    })
}

/// `t = m^{2/3} (λ̂_max − μ) / σ₀`.
pub fn standardize_stat(lambda_max_hat: f64, m: usize, e: &EdgeParams) -> f64 {
    (m as f64).powf(2.0 / 3.0) * (lambda_max_hat - e.mu) / e.sigma0
}

/// `P_D ≈ Q((σ₀ t_th − m^{2/3}(ν−μ)) / (m^{1/6} σ₁))`, `t_th = F₂⁻¹(1−α)`.
pub fn asymptotic_power(h: &HighDimParams, m: usize, alpha: f64) -> Result<f64> {
    asymptotic_power_with(h, m, alpha, Tw2Table::bundled())
}

pub fn asymptotic_power_with(h: &HighDimParams, m: usize, alpha: f64, table: &Tw2Table) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if m == 0 {
        return Err(Error::InvalidDims("m must be positive".into()));
    }
    let e = edge_params(h)?;
    let s = spike_params(h)?;
    let (nu, sigma1) = (s.nu()?, s.sigma1()?);
    let t_th = table.quantile(1.0 - alpha);
    let mf = m as f64;
    let arg = (e.sigma0 * t_th - mf.powf(2.0 / 3.0) * (nu - e.mu)) / (mf.powf(1.0 / 6.0) * sigma1);
    Ok(q_function(arg))
}

/// Null-calibrated threshold on `λ̂_max`: `μ + m^{−2/3} σ₀ F₂⁻¹(1−α)`.
pub fn tw_threshold(e: &EdgeParams, m: usize, alpha: f64, table: &Tw2Table) -> f64 {
    e.mu + (m as f64).powf(-2.0 / 3.0) * e.sigma0 * table.quantile(1.0 - alpha)
}
