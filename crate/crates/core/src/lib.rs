//! Exact and high-dimensional distributions of the leading eigenvalue of
//! complex F-matrices `S⁻¹R`, with `S ~ CW_m(n, I)` and `R ~ CW_m(p, I, Ω)`
//! carrying a rank-one non-centrality, and the Roy largest-root detector
//! built on top of them.
//!
//! Layout:
//!
//! * [`specfun`]: scalar special functions, overflow-safe [`ScaledReal`] and series control.
//! * [`linalg`]: small dense kernels (log-determinants, Cholesky, Hermitian eigensolvers).
//! * [`fdist`]: finite-dimensional CDFs of `λ_max(S⁻¹R)`, central and rank-one non-central,
//!   singular (`p < m`) and non-singular.
//! * [`detector`]: false-alarm and detection probabilities, thresholds, ROC profiles.
//! * [`asymptotic`]: Tracy-Widom edge and spiked-regime parameters, asymptotic power.
//! * [`montecarlo`]: the sampling oracle used to cross-check everything above.
//! * [`cli`]: the `roy-detect` command-line front end and its output records.

// Negated comparisons are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod asymptotic;
pub mod cli;
pub mod detector;
mod error;
pub mod fdist;
pub mod linalg;
pub mod montecarlo;
pub mod specfun;
pub mod validate;

pub use error::{Error, Result};
pub use specfun::{ScaledReal, SeriesControl};
