//! Exact finite-dimensional CDFs of the largest eigenvalue of complex
//! F-matrices `S⁻¹R`, with `S ~ CW_m(n, I)` and `R ~ CW_m(p, I, Θ)`:
//! the central case and a rank-one non-centrality `θ = tr ΘΘ†`.
//! The case `p < m` is reduced to `p ≥ m` by [`effective_dims`].

mod central;
mod dims;
mod kernels;
mod noncentral;

use crate::error::{Error, Result};

pub use central::central_lmax_cdf;
pub use dims::{effective_dims, x_of_t, EffectiveDims, ModelDims, NoncentralSpec};
pub use kernels::{k_mn, phi_derivative_oracle, phi_oracle, psi_entry, psi_entry_with, xi_entry, PsiConvention};
pub use noncentral::{noncentral_lmax_cdf, noncentral_lmax_cdf_direct};

/// Values within this distance outside `[0, 1]` are treated as rounding.
pub const RANGE_SLACK: f64 = 1e-6;

/// Range check and clamp on an assembled CDF value.
pub(crate) fn finalize(v: f64, context: &str) -> Result<f64> {
    if !v.is_finite() || !(-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&v) {
        return Err(Error::NumericalBreakdown {
            context: context.to_string(),
            value: v,
        });
    }
    Ok(v.clamp(0.0, 1.0))
}
