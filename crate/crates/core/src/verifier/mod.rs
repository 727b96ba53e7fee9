//! Harnesses that evaluate both sides of the second main theorem type
//! inequalities on a radius grid, with a machine-checked hypothesis list,
//! plus the exact tests behind the Picard-type statements and the
//! q-difference polynomial tools used by the Clunie-type estimates.
//!
//! A run only receives a pass or fail verdict when every hypothesis is
//! verified; otherwise it reports its numbers without judgment.

mod picard;
mod qdiff;
mod report;
mod smt;

pub use picard::{
    forward_invariance_check, gundersen_hayman_identity, partition_by_q_ratio, picard_check,
    projectively_q_invariant, IdentityReport, IdentityRow, PartitionResult, PicardReport,
    RatioWitness,
};
pub use qdiff::{
    clunie_check, eval_qdiff_at, eval_qdiff_polynomial, tumura_clunie_ratio, ClunieReport,
    IdentityCheck, QDiffFactor, QDiffPolynomial, QDiffTerm, RatioSample, TumuraReport,
    IDENTITY_TOL, RANGE_VALID_TOL, TUMURA_FLOOR,
};
pub use report::{
    all_verified, margin_trend, unmet, HypothesisCheck, HypothesisStatus, SmtReport, SmtRow, Term,
    Verdict, TREND_FLOOR,
};
pub use smt::{
    admissible_subsets, verify_cartan_smt, verify_hsmt_weil, verify_hypersurface_smt,
    weil_proximity, CasoratiCoefficients, SmtOptions,
};

#[cfg(test)]
mod tests;
