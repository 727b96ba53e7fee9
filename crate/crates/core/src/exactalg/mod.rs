//! Exact arithmetic: Gaussian rationals, sparse multivariate polynomials in
//! lex order, rational functions, gcd, restriction to complex lines and
//! univariate root extraction.

mod gaussian;
mod gcd;
mod line;
mod poly;
mod rational;
mod roots;
mod uni;

pub use gaussian::{format_rational, parse_rational, GaussianRational, RationalLiteral};
pub use gcd::{content, poly_gcd, poly_gcd_many, primitive_part, pseudo_remainder};
pub use line::{restrict_to_line, Line, LinePoly};
pub use poly::{poly_arith, MultiIndex, PolyOp, Polynomial};
pub use rational::RationalFunction;
pub use roots::{
    roots_exact, roots_f64, univariate_roots, Root, UnivariateRootMultiset, DEFAULT_ROOT_TOL,
};
pub use uni::UniPoly;

/// Restrict both parts of a rational function to a line.
pub fn restrict_rational_to_line(
    r: &RationalFunction,
    line: &Line,
) -> crate::Result<(LinePoly, LinePoly)> {
    Ok((
        restrict_to_line(r.num(), line)?,
        restrict_to_line(r.den(), line)?,
    ))
}
