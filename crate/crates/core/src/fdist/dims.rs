use crate::error::{Error, Result};

/// Dimensions of the F-matrix model: `m` sensors, `n` noise-only samples,
/// `p` primary samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModelDims {
    pub m: usize,
    pub n: usize,
    pub p: usize,
}

impl ModelDims {
    pub fn new(m: usize, n: usize, p: usize) -> Result<Self> {
        let d = Self { m, n, p };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 || self.p == 0 {
            return Err(Error::InvalidDims(format!(
                "m, n, p must be positive (got m={}, n={}, p={})",
                self.m, self.n, self.p
            )));
        }
        if self.n < self.m {
            return Err(Error::InvalidDims(format!(
                "need n >= m for an invertible noise covariance estimate (got m={}, n={})",
                self.m, self.n
            )));
        }
        Ok(())
    }

    /// `p < m`: the signal-plus-noise Wishart factor is rank deficient.
    pub fn is_singular(&self) -> bool {
        self.p < self.m
    }

    /// `α = n − m`.
    pub fn alpha(&self) -> usize {
        self.n - self.m
    }

    /// `β = p − m`, negative in the singular case.
    pub fn beta(&self) -> i64 {
        self.p as i64 - self.m as i64
    }

    /// `κ = p / n`, the rescaling between `λ_max(Σ̂⁻¹R̂)` and `λ_max(S⁻¹R)`.
    pub fn kappa(&self) -> f64 {
        self.p as f64 / self.n as f64
    }
}

/// Dimensions after the singular-case remap; always `p ≥ m` and `n ≥ m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EffectiveDims {
    pub m: usize,
    pub n: usize,
    pub p: usize,
}

impl EffectiveDims {
    pub fn alpha(&self) -> usize {
        self.n - self.m
    }

    pub fn beta(&self) -> usize {
        self.p - self.m
    }
}

/// Non-centrality, either in the canonical frame (`θ = tr ΘΘ†`) or in the
/// detector frame (`γ = p s†A†Σ⁻¹As`). For a rank-one mean both are the same
/// scalar fed to the CDF.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoncentralSpec {
    Theta(f64),
    Gamma(f64),
}

impl NoncentralSpec {
    pub fn theta(&self) -> Result<f64> {
        let v = match *self {
            Self::Theta(v) | Self::Gamma(v) => v,
        };
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("non-centrality must be finite and >= 0, got {v}")));
        }
        Ok(v)
    }
}

/// Identity when `p ≥ m`; otherwise `(m, n, p) → (p, n + p − m, m)`.
pub fn effective_dims(d: &ModelDims) -> Result<EffectiveDims> {
    d.validate()?;
    Ok(if d.is_singular() {
        EffectiveDims {
            m: d.p,
            n: d.n + d.p - d.m,
            p: d.m,
        }
    } else {
        EffectiveDims { m: d.m, n: d.n, p: d.p }
    })
}

/// `x = t / (1 + t)`, the Jacobi-ensemble variable of `λ_max = t`.
pub fn x_of_t(t: f64) -> f64 {
    if t.is_infinite() {
        return 1.0;
    }
    t / (1.0 + t)
}
