//! The rescaling `z ↦ qz`, q-Casorati determinants, nondegeneracy and
//! q-periodicity tests, and the logarithmic difference and shift counting
//! ratios.

mod casorati;
mod ratios;
mod shift;

pub use casorati::{
    algebraic_nondegeneracy, casorati, casorati_both_routes, casorati_monomials, decide_casorati,
    linear_nondegeneracy, monomial_components, q_periodic_test, qscale, shift_matrix, Degeneracy,
    NondegeneracyReport, NumericTest, MONOMIAL_CAP,
};
pub use ratios::{ldl_ratio, shift_counting_ratio, RatioReport, RatioRow, RATIO_FLOOR};
pub use shift::QShift;

#[cfg(test)]
mod tests;
