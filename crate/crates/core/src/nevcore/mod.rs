//! Proximity, counting and characteristic functions on `ℂ^m`, computed from
//! one-variable slices `u ↦ h(uξ)` averaged over sampled directions `ξ`.
//!
//! Conventions: directions carry equal weights summing to 1, counting
//! functions start at radius 1 (`N(r) = Σ_{|a|≤r} log(r / max(|a|, 1))`), and
//! `T_f` uses the Euclidean norm of the components.

mod functionals;
mod quad;

pub use functionals::{
    characteristic, characteristic_on, counting, fmt_residual, jensen_residual, log_slope,
    nevanlinna, order_estimate, proximity, weil_value, FmtRow, LineBundle, NevSample, Sample,
    SliceStats, SphereMeans,
};
pub(crate) use functionals::{ls_slope, weil_at};
pub use quad::{circle_mean, QuadratureSpec, RadialGrid, NODE_OFFSET};

/// Order estimates below this are read as order zero on desk-scale grids,
/// where `T = c·(log r)^k` gives slopes of about `k / log r`.
pub const ZERO_ORDER_THRESHOLD: f64 = 0.5;
