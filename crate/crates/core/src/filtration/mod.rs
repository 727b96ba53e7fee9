//! Filtrations of the degree-α forms `V_α` by powers of `n` forms `γ_j`
//! meeting in finitely many points of `ℙ^n`: levels `W_(i)`, quotient
//! dimensions `Δ_(i)`, an adapted basis, the totals `Δ` and `M`, and the
//! Hilbert function scan that certifies the finiteness hypothesis.

mod build;
mod hilbert;

pub use build::{
    build_filtration, delta_totals, enumerate_tuples, lift_to_common_degree, m_alpha,
    quotient_check, BasisElement, Filtration, FiltrationLevel, FiltrationReport, LevelCheck,
    Ratios, COLUMN_CAP,
};
pub use hilbert::{
    complete_intersection_series, hilbert_stabilization, hilbert_value, HilbertReport,
    HilbertVerdict,
};

#[cfg(test)]
mod tests;
