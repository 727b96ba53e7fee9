use nalgebra::DMatrix;
use num::complex::Complex64;
use serde::Serialize;

use super::poly::Polynomial;
use super::uni::UniPoly;
use crate::error::{usage, NevError, Result};

/// Default relative clustering radius.
pub const DEFAULT_ROOT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Root {
    pub location: Complex64,
    pub multiplicity: u32,
}

/// Roots with multiplicities plus a certification radius: every reported
/// location lies within `residual` of a true root.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnivariateRootMultiset {
    pub roots: Vec<Root>,
    pub residual: f64,
}

impl UnivariateRootMultiset {
    pub fn total_multiplicity(&self) -> u32 {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn empty() -> Self {
        UnivariateRootMultiset {
            roots: vec![],
            residual: 0.0,
        }
    }

    /// Multiply every location by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        UnivariateRootMultiset {
            roots: self
                .roots
                .iter()
                .map(|r| Root {
                    location: r.location * s,
                    multiplicity: r.multiplicity,
                })
                .collect(),
            residual: self.residual * s,
        }
    }

    fn sort(&mut self) {
        self.roots.sort_by(|a, b| {
            a.location
                .norm()
                .total_cmp(&b.location.norm())
                .then(a.location.arg().total_cmp(&b.location.arg()))
        });
    }
}

/// Roots of an exact univariate polynomial.
///
/// Multiplicities come from an exact square-free decomposition, so repeated
/// roots are never split by rounding. Each square-free factor is solved by
/// companion eigenvalues and Newton polishing.
pub fn univariate_roots(p: &Polynomial, tol: f64) -> Result<UnivariateRootMultiset> {
    roots_exact(&UniPoly::from_poly(p)?, tol)
}

pub fn roots_exact(p: &UniPoly, tol: f64) -> Result<UnivariateRootMultiset> {
    if p.is_zero() {
        return usage("roots of the identically zero polynomial");
    }
    let (k0, rest) = p.strip_zero_roots();
    let mut out = Vec::new();
    let mut residual: f64 = 0.0;
    if k0 > 0 {
        out.push(Root {
            location: Complex64::new(0.0, 0.0),
            multiplicity: k0 as u32,
        });
    }
    for (factor, mult) in rest.squarefree() {
        let coeffs = factor.to_c64();
        let (locs, res) = if factor.degree() == Some(1) {
            // exact linear root, rounded once
            let c = factor.coeffs();
            let r = (-&c[0] / &c[1]).to_c64();
            (vec![r], r.norm() * f64::EPSILON)
        } else {
            solve_squarefree(&coeffs)?
        };
        residual = residual.max(res);
        out.extend(locs.into_iter().map(|location| Root {
            location,
            multiplicity: mult,
        }));
    }
    let mut ms = UnivariateRootMultiset {
        roots: cluster(out, tol),
        residual,
    };
    ms.sort();
    Ok(ms)
}

/// Roots of a double-precision polynomial (coefficients lowest degree first).
/// Leading zeros are a degree drop at infinity; repeated roots are recovered
/// only up to the clustering radius.
pub fn roots_f64(coeffs: &[Complex64], tol: f64) -> Result<UnivariateRootMultiset> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|v| *v == Complex64::new(0.0, 0.0)) {
        c.pop();
    }
    if c.is_empty() {
        return usage("roots of the identically zero polynomial");
    }
    let k0 = c.iter().take_while(|v| v.norm() == 0.0).count();
    let rest = &c[k0..];
    let mut out = Vec::new();
    if k0 > 0 {
        out.push(Root {
            location: Complex64::new(0.0, 0.0),
            multiplicity: k0 as u32,
        });
    }
    let (locs, residual) = if rest.len() > 1 {
        solve_squarefree(rest)?
    } else {
        (vec![], 0.0)
    };
    out.extend(locs.into_iter().map(|location| Root {
        location,
        multiplicity: 1,
    }));
    let mut ms = UnivariateRootMultiset {
        roots: cluster(out, tol),
        residual,
    };
    ms.sort();
    Ok(ms)
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Eigenvalues of the companion matrix, then Newton polishing. Returns the
/// roots and the largest Newton inclusion radius `deg·|p/p'|`.
fn solve_squarefree(c: &[Complex64]) -> Result<(Vec<Complex64>, f64)> {
    let deg = c.len() - 1;
    let lead = c[deg];
    let monic: Vec<Complex64> = c.iter().map(|v| v / lead).collect();
    if deg == 1 {
        let r = -monic[0];
        return Ok((vec![r], r.norm() * f64::EPSILON));
    }
    // QR can stall on symmetric root configurations such as z^4 + 1; retry
    // on p(z + s) for a few off-axis shifts
    let bound = 1.0 + monic[..deg].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut roots = None;
    for s in [0.0, 0.137, -0.291, 0.523] {
        let shift = Complex64::new(s, 0.61 * s) * bound;
        if let Some(mut r) = companion_eigenvalues(&taylor_shift(&monic, shift)) {
            r.iter_mut().for_each(|z| *z += shift);
            roots = Some(r);
            break;
        }
    }
    let mut roots = roots.ok_or_else(|| {
        NevError::Numeric(format!(
            "companion eigenvalue iteration did not converge (degree {deg})"
        ))
    })?;
    let mut residual: f64 = 0.0;
    for r in roots.iter_mut() {
        for _ in 0..60 {
            let (p, dp) = horner(&monic, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            let cand = *r - step;
            if !cand.re.is_finite() || !cand.im.is_finite() {
                break;
            }
            *r = cand;
            if step.norm() <= 4.0 * f64::EPSILON * r.norm().max(f64::MIN_POSITIVE) {
                break;
            }
        }
        let (p, dp) = horner(&monic, *r);
        let rad = if dp.norm() > 0.0 {
            deg as f64 * (p / dp).norm()
        } else {
            f64::INFINITY
        };
        residual = residual.max(rad.max(r.norm() * f64::EPSILON));
    }
    if roots.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
        return Err(NevError::Numeric(format!(
            "non-finite root estimate for degree {deg} factor"
        )));
    }
    Ok((roots, residual))
}

/// Coefficients of `p(z + s)`, lowest degree first.
fn taylor_shift(c: &[Complex64], s: Complex64) -> Vec<Complex64> {
    let mut out = c.to_vec();
    if s == Complex64::new(0.0, 0.0) {
        return out;
    }
    let n = out.len();
    for i in 0..n {
        for k in (i..n - 1).rev() {
            let hi = out[k + 1];
            out[k] += s * hi;
        }
    }
    out
}

/// Eigenvalues of the companion matrix of a monic polynomial.
fn companion_eigenvalues(monic: &[Complex64]) -> Option<Vec<Complex64>> {
    let deg = monic.len() - 1;
    let mut m = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -monic[i];
    }
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)?;
    Some(schur.eigenvalues()?.iter().copied().collect())
}

/// Merge roots closer than `tol·max(1,|z|)`, summing multiplicities.
fn cluster(roots: Vec<Root>, tol: f64) -> Vec<Root> {
    let mut out: Vec<(Complex64, u32, Complex64)> = Vec::new();
    for r in roots {
        let hit = out.iter_mut().find(|(loc, _, _)| {
            (loc - r.location).norm() <= tol * loc.norm().max(r.location.norm()).max(1.0)
        });
        match hit {
            Some((loc, m, sum)) => {
                *sum += r.location * r.multiplicity as f64;
                *m += r.multiplicity;
                *loc = *sum / *m as f64;
            }
            None => out.push((
                r.location,
                r.multiplicity,
                r.location * r.multiplicity as f64,
            )),
        }
    }
    out.into_iter()
        .map(|(location, multiplicity, _)| Root {
            location,
            multiplicity,
        })
        .collect()
}
