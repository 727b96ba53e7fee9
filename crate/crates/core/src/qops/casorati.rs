use num::complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::shift::QShift;
use crate::error::{usage, NevError, Result};
use crate::exactalg::{MultiIndex, RationalFunction};
use crate::funcspace::{ProjectiveMap, SliceFunction};
use crate::linalg::{det_cofactor, det_rational_bareiss, det_scaled};
use crate::scaled::ScaledComplex;

/// Default cap on the number of monomials in a generalized Casoratian.
pub const MONOMIAL_CAP: usize = 64;

/// `h(q^k z)`.
pub fn qscale(h: &SliceFunction, q: &QShift, k: i64) -> Result<SliceFunction> {
    if q.nvars() != h.nvars() {
        return usage(format!(
            "q-shift in {} variables applied to a function of {}",
            q.nvars(),
            h.nvars()
        ));
    }
    Ok(h.qscale(q, k))
}

fn check_inputs(components: &[SliceFunction], q: &QShift) -> Result<usize> {
    if components.is_empty() {
        return usage("Casoratian of an empty tuple");
    }
    let m = components[0].nvars();
    if components.iter().any(|c| c.nvars() != m) {
        return usage("Casoratian inputs in different numbers of variables");
    }
    if q.nvars() != m {
        return usage(format!(
            "q-shift in {} variables for functions of {m}",
            q.nvars()
        ));
    }
    Ok(m)
}

/// The shift matrix `[f_j(q^k z)]` of rational inputs.
pub fn shift_matrix(components: &[RationalFunction], q: &QShift) -> Vec<Vec<RationalFunction>> {
    (0..components.len())
        .map(|k| {
            let qk = q.power(k as i64);
            components.iter().map(|f| f.scale_vars(&qk)).collect()
        })
        .collect()
}

/// `det[f_j(q^k z)]`, exact for rational inputs.
///
/// Sizes up to 4 expand by cofactors, larger ones use fraction-free
/// elimination. Any non-rational input yields a function evaluated
/// pointwise.
pub fn casorati(components: &[SliceFunction], q: &QShift) -> Result<SliceFunction> {
    let m = check_inputs(components, q)?;
    let rats: Option<Vec<RationalFunction>> = components
        .iter()
        .map(|c| c.as_rational().cloned())
        .collect();
    match rats {
        Some(r) => {
            let mat = shift_matrix(&r, q);
            let d = if r.len() <= 4 {
                det_cofactor(&mat, m)?
            } else {
                det_rational_bareiss(&mat, m)?
            };
            Ok(d.into())
        }
        None => Ok(SliceFunction::Casorati(components.to_vec(), q.clone())),
    }
}

/// Both exact determinant routes, for cross-checking.
pub fn casorati_both_routes(
    components: &[RationalFunction],
    q: &QShift,
) -> Result<(RationalFunction, RationalFunction)> {
    if components.is_empty() {
        return usage("Casoratian of an empty tuple");
    }
    let m = components[0].nvars();
    let mat = shift_matrix(components, q);
    Ok((det_cofactor(&mat, m)?, det_rational_bareiss(&mat, m)?))
}

/// The monomials `f^I`, `I` of degree `alpha` in descending lex order.
pub fn monomial_components(
    f: &ProjectiveMap,
    alpha: u32,
    cap: usize,
) -> Result<Vec<SliceFunction>> {
    let n1 = f.components().len();
    let count = crate::funcspace::dim_v(n1, alpha);
    if count > cap {
        return Err(NevError::Size(format!(
            "{count} monomials of degree {alpha} in {n1} components exceed the cap {cap}"
        )));
    }
    MultiIndex::all_of_degree(n1, alpha)
        .into_iter()
        .map(|e| {
            let parts: Vec<SliceFunction> =
                e.0.iter()
                    .enumerate()
                    .filter(|(_, k)| **k > 0)
                    .map(|(j, &k)| SliceFunction::power(f.components()[j].clone(), k as i32))
                    .collect::<Result<_>>()?;
            if parts.is_empty() {
                Ok(SliceFunction::constant(f.nvars(), 1))
            } else {
                SliceFunction::product(parts)
            }
        })
        .collect()
}

/// `C(f^{I_1}, …, f^{I_M})` over the degree-`alpha` monomials.
pub fn casorati_monomials(
    f: &ProjectiveMap,
    alpha: u32,
    q: &QShift,
    cap: usize,
) -> Result<SliceFunction> {
    casorati(&monomial_components(f, alpha, cap)?, q)
}

/// Outcome of a nondegeneracy test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    /// The Casoratian is not identically zero.
    Nondegenerate,
    /// The Casoratian is identically zero (exact).
    Degenerate,
    /// Every numeric sample was below threshold; not a proof.
    LikelyDegenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NondegeneracyReport {
    pub verdict: Degeneracy,
    pub symbolic: bool,
    pub samples: usize,
    /// Largest `|det| / ∏ ‖row‖` seen at the samples (numeric path).
    pub max_relative: Option<f64>,
    pub casorati: String,
}

impl NondegeneracyReport {
    pub fn is_nondegenerate(&self) -> bool {
        self.verdict == Degeneracy::Nondegenerate
    }
}

/// Sample points and threshold for numeric identity tests.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericTest {
    pub samples: usize,
    pub seed: u64,
    pub threshold: f64,
}

impl Default for NumericTest {
    fn default() -> Self {
        NumericTest {
            samples: 8,
            seed: 0,
            threshold: 1e-10,
        }
    }
}

fn sample_point(rng: &mut ChaCha8Rng, m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|_| {
            let r = 0.3 + 1.7 * rng.random::<f64>();
            let th = std::f64::consts::TAU * rng.random::<f64>();
            Complex64::from_polar(r, th)
        })
        .collect()
}

/// Decide whether `det[f_j(q^k z)] ≢ 0`.
pub fn decide_casorati(
    components: &[SliceFunction],
    q: &QShift,
    test: NumericTest,
) -> Result<NondegeneracyReport> {
    let m = check_inputs(components, q)?;
    let c = casorati(components, q)?;
    if let Some(r) = c.as_rational() {
        return Ok(NondegeneracyReport {
            verdict: if r.is_zero() {
                Degeneracy::Degenerate
            } else {
                Degeneracy::Nondegenerate
            },
            symbolic: true,
            samples: 0,
            max_relative: None,
            casorati: r.to_string(),
        });
    }
    let samples = test.samples.max(8);
    let mut rng = ChaCha8Rng::seed_from_u64(test.seed);
    let n = components.len();
    let mut best = f64::NEG_INFINITY;
    for _ in 0..samples {
        let z = sample_point(&mut rng, m);
        let rows: Vec<Vec<ScaledComplex>> = (0..n)
            .map(|k| {
                let zk = q.apply_c64(&z, k as i32);
                components.iter().map(|f| f.eval_scaled(&zk)).collect()
            })
            .collect();
        let det = det_scaled(&rows);
        if det.is_zero() {
            continue;
        }
        let mut scale = 0.0;
        for row in &rows {
            let logs: Vec<f64> = row.iter().map(|v| v.ln_abs()).collect();
            scale += crate::funcspace::log_norm_from_logs(&logs);
        }
        best = best.max(det.ln_abs() - scale);
    }
    let max_relative = Some(best.exp());
    let verdict = if best > test.threshold.ln() {
        Degeneracy::Nondegenerate
    } else {
        Degeneracy::LikelyDegenerate
    };
    Ok(NondegeneracyReport {
        verdict,
        symbolic: false,
        samples,
        max_relative,
        casorati: c.describe(),
    })
}

/// Linear nondegeneracy of `f` through `C(f_0, …, f_n) ≢ 0`.
pub fn linear_nondegeneracy(
    f: &ProjectiveMap,
    q: &QShift,
    test: NumericTest,
) -> Result<NondegeneracyReport> {
    decide_casorati(f.components(), q, test)
}

/// Algebraic nondegeneracy of `f` in degree `alpha` through `C̃(f) ≢ 0`.
pub fn algebraic_nondegeneracy(
    f: &ProjectiveMap,
    alpha: u32,
    q: &QShift,
    test: NumericTest,
) -> Result<NondegeneracyReport> {
    decide_casorati(&monomial_components(f, alpha, MONOMIAL_CAP)?, q, test)
}

/// `h(qz) ≡ h(z)` for rational `h`, by cross-multiplication.
pub fn q_periodic_test(h: &SliceFunction, q: &QShift) -> Result<bool> {
    let r = h.as_rational().ok_or_else(|| {
        NevError::Unsupported(format!(
            "q-periodicity of {} is only decided for rational functions; sample numerically instead",
            h.describe()
        ))
    })?;
    if q.nvars() != r.nvars() {
        return usage("q-shift and function differ in variable count");
    }
    let qq = q.power(1);
    let lhs = r.num().scale_vars(&qq).checked_mul(r.den())?;
    let rhs = r.num().checked_mul(&r.den().scale_vars(&qq))?;
    Ok(lhs == rhs)
}
