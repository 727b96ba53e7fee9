//! Meromorphic functions on `ℂ^m` that restrict to complex lines with
//! certified zero sets, projective maps, homogeneous forms and general
//! position.

mod linefn;
mod map;
mod position;
mod slice;

pub use linefn::{root_trapezoid_error, DivisorPoint, KnownDivisor, LineFactor, LineFunction};
pub use map::{
    apply_form, log_norm_from_logs, reduce_representation, HomogeneousForm, ProjectiveMap,
};
pub(crate) use position::subsets;
pub use position::{
    binom, check_general_position, dim_v, ideal_slice_dim, GeneralPositionResult, MonomialSpace,
    PositionWitness,
};
pub use slice::{QPochhammerSpec, SliceFunction, SliceFunctionJson, DEFAULT_PRODUCT_TOL};
