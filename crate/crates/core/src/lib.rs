//! Numerical and exact tooling for value distribution of holomorphic maps
//! from several complex variables into projective space, with q-difference
//! operators.
//!
//! The crate is organised bottom-up:
//!
//! * [`exactalg`]: Gaussian rationals, sparse polynomials, gcd and roots.
//! * [`funcspace`]: slice functions (rational, q-Pochhammer products and
//!   their combinations), projective maps and homogeneous forms.
//! * [`nevcore`]: counting, proximity and characteristic functions computed
//!   by averaging over complex lines.
//! * [`qops`]: q-shifts, Casorati determinants and nondegeneracy tests.
//! * [`filtration`]: graded filtrations of `V_alpha` by powers of forms.
//! * [`verifier`]: numeric harnesses for second main theorem type
//!   inequalities and their companions.

pub mod error;
pub mod exactalg;
pub mod filtration;
pub mod funcspace;
pub mod linalg;
pub mod nevcore;
pub mod qops;
pub mod scaled;
pub mod verifier;

pub use error::{NevError, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/exact-algebra.md")]
    mod exact_algebra {}
    #[doc = include_str!("../../../book/src/slice-functions.md")]
    mod slice_functions {}
    #[doc = include_str!("../../../book/src/functionals.md")]
    mod functionals {}
    #[doc = include_str!("../../../book/src/q-operators.md")]
    mod q_operators {}
    #[doc = include_str!("../../../book/src/filtration.md")]
    mod filtration {}
    #[doc = include_str!("../../../book/src/harnesses.md")]
    mod harnesses {}
}
