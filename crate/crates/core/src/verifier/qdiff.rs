use num::complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::report::{verdict, HypothesisCheck, HypothesisStatus, Verdict};
use crate::error::{usage, NevError, Result};
use crate::funcspace::SliceFunction;
use crate::nevcore::{
    ls_slope, order_estimate, LineBundle, QuadratureSpec, RadialGrid, ZERO_ORDER_THRESHOLD,
};
use crate::qops::{QShift, RATIO_FLOOR};

/// `w(q_s z)^e`; no shift means `w(z)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QDiffFactor {
    #[serde(default)]
    pub shift: Option<QShift>,
    pub exponent: u32,
}

impl QDiffFactor {
    pub fn plain(exponent: u32) -> Self {
        QDiffFactor {
            shift: None,
            exponent,
        }
    }

    pub fn shifted(q: QShift, exponent: u32) -> Self {
        QDiffFactor {
            shift: Some(q),
            exponent,
        }
    }

    fn is_identity(&self) -> bool {
        self.shift
            .as_ref()
            .is_none_or(|q| q.entries().iter().all(|x| x.is_one()))
    }
}

/// `a(z) Π w(q_s z)^{e_s}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QDiffTerm {
    pub coeff: SliceFunction,
    #[serde(default)]
    pub factors: Vec<QDiffFactor>,
}

impl QDiffTerm {
    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|f| f.exponent).sum()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QDiffJson {
    nvars: usize,
    #[serde(default)]
    terms: Vec<QDiffTerm>,
}

/// A q-difference polynomial `Σ_λ a_λ(z) Π_s w(q_s z)^{l_s}` in an
/// unknown function `w`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QDiffJson")]
pub struct QDiffPolynomial {
    nvars: usize,
    terms: Vec<QDiffTerm>,
}

impl TryFrom<QDiffJson> for QDiffPolynomial {
    type Error = NevError;
    fn try_from(j: QDiffJson) -> Result<Self> {
        QDiffPolynomial::new(j.nvars, j.terms)
    }
}

impl QDiffPolynomial {
    pub fn new(nvars: usize, terms: Vec<QDiffTerm>) -> Result<Self> {
        for (i, t) in terms.iter().enumerate() {
            if t.coeff.nvars() != nvars {
                return usage(format!(
                    "term {i}: coefficient in {} variables",
                    t.coeff.nvars()
                ));
            }
            for f in &t.factors {
                if f.exponent == 0 {
                    return usage(format!("term {i}: zero exponent"));
                }
                if let Some(q) = &f.shift {
                    if q.nvars() != nvars {
                        return usage(format!("term {i}: shift in {} variables", q.nvars()));
                    }
                }
            }
        }
        Ok(QDiffPolynomial { nvars, terms })
    }

    pub fn zero(nvars: usize) -> Self {
        QDiffPolynomial {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[QDiffTerm] {
        &self.terms
    }

    /// Largest `Σ exponents` over the terms; 0 for the empty polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.degree()).max().unwrap_or(0)
    }

    /// Number of terms attaining the total degree.
    pub fn top_terms(&self) -> usize {
        let d = self.total_degree();
        self.terms.iter().filter(|t| t.degree() == d).count()
    }

    pub fn all_diagonal(&self) -> bool {
        self.shifts().all(|q| q.is_diagonal())
    }

    fn shifts(&self) -> impl Iterator<Item = &QShift> {
        self.terms
            .iter()
            .flat_map(|t| t.factors.iter().filter_map(|f| f.shift.as_ref()))
    }

    fn has_proper_shift(&self) -> bool {
        self.terms
            .iter()
            .any(|t| t.factors.iter().any(|f| !f.is_identity()))
    }

    fn coefficients(&self) -> impl Iterator<Item = &SliceFunction> {
        self.terms.iter().map(|t| &t.coeff)
    }
}

/// `P(z, w)` as a slice function; exact when `w` and the coefficients are rational.
pub fn eval_qdiff_polynomial(p: &QDiffPolynomial, w: &SliceFunction) -> Result<SliceFunction> {
    if w.nvars() != p.nvars {
        return usage(format!(
            "w in {} variables for a polynomial in {}",
            w.nvars(),
            p.nvars
        ));
    }
    if p.terms.is_empty() {
        return Ok(SliceFunction::constant(p.nvars, 0));
    }
    let terms = p
        .terms
        .iter()
        .map(|t| {
            let mut parts = vec![t.coeff.clone()];
            for f in &t.factors {
                let ws = match &f.shift {
                    Some(q) => w.qscale(q, 1),
                    None => w.clone(),
                };
                parts.push(SliceFunction::power(ws, f.exponent as i32)?);
            }
            SliceFunction::product(parts)
        })
        .collect::<Result<Vec<_>>>()?;
    SliceFunction::sum(terms)
}

/// `P(z, w)` at a point.
pub fn eval_qdiff_at(p: &QDiffPolynomial, w: &SliceFunction, z: &[Complex64]) -> Result<Complex64> {
    if z.len() != p.nvars {
        return usage(format!(
            "point in C^{} for a polynomial on C^{}",
            z.len(),
            p.nvars
        ));
    }
    Ok(eval_qdiff_polynomial(p, w)?.eval_c64(z))
}

fn sample_points(m: usize, count: usize) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    (0..count)
        .map(|_| {
            (0..m)
                .map(|_| {
                    let r = 0.3 + 2.7 * rng.random::<f64>();
                    Complex64::from_polar(r, std::f64::consts::TAU * rng.random::<f64>())
                })
                .collect()
        })
        .collect()
}

/// Residual tolerance of the numeric identity test.
pub const IDENTITY_TOL: f64 = 1e-9;

/// How `U·P = Q` was confirmed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityCheck {
    Symbolic,
    /// Relative residual at most [`IDENTITY_TOL`] at every sample point.
    Numeric,
}

fn check_identity(up: &SliceFunction, q: &SliceFunction, m: usize) -> Result<IdentityCheck> {
    if let (Some(a), Some(b)) = (up.as_rational(), q.as_rational()) {
        return if a == b {
            Ok(IdentityCheck::Symbolic)
        } else {
            usage(format!("U*P = Q fails: U*P = {a}, Q = {b}"))
        };
    }
    for z in sample_points(m, 8) {
        let a = up.eval_c64(&z);
        let b = q.eval_c64(&z);
        let scale = a.norm().max(b.norm()).max(1.0);
        if !((a - b).norm() <= IDENTITY_TOL * scale) {
            return usage(format!(
                "U*P = Q fails at {z:?}: residual {:.3e}",
                (a - b).norm() / scale
            ));
        }
    }
    Ok(IdentityCheck::Numeric)
}

/// One radius of a ratio harness.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioSample {
    pub r: f64,
    pub numerator: f64,
    pub t: f64,
    pub ratio: Option<f64>,
    pub err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClunieReport {
    pub identity: IdentityCheck,
    pub deg_u: u32,
    pub deg_q: u32,
    /// Rows of `m(r, P(z, w)) / T_w(r)`.
    pub rows: Vec<RatioSample>,
    /// Rows of `T(r, a)/T_w(r)` for each non-constant coefficient.
    pub coefficient_ratios: Vec<Vec<Option<f64>>>,
    pub hypotheses: Vec<HypothesisCheck>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

fn decays(v: &[Option<f64>], radii: &[f64]) -> Option<bool> {
    let pts: Vec<(f64, f64)> = v
        .iter()
        .zip(radii)
        .filter_map(|(x, r)| x.map(|x| (r.ln(), x)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    if pts.iter().all(|p| p.1.abs() <= 1e-6) {
        return Some(true);
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    Some(ls_slope(&xs, &ys) < 0.0 && ys[ys.len() - 1] < ys[0])
}

fn order_check(radii: &[f64], t: &[f64]) -> HypothesisCheck {
    if radii.len() < 4 {
        return HypothesisCheck::new(
            "zero order",
            HypothesisStatus::Unchecked,
            "grid too short for an order estimate",
        );
    }
    match order_estimate(radii, t) {
        Ok(o) => HypothesisCheck::from_bool(
            "zero order",
            o < ZERO_ORDER_THRESHOLD,
            format!("order estimate {o:.3}"),
        ),
        Err(e) => HypothesisCheck::new("zero order", HypothesisStatus::Unchecked, e.to_string()),
    }
}

/// Clunie-type estimate `m(r, P(z, w)) = o(T_w(r))` for `U(z,w) P(z,w) = Q(z,w)`.
pub fn clunie_check(
    u: &QDiffPolynomial,
    p: &QDiffPolynomial,
    q: &QDiffPolynomial,
    w: &SliceFunction,
    grid: &RadialGrid,
    quad: &QuadratureSpec,
) -> Result<ClunieReport> {
    let m = w.nvars();
    if [u, p, q].iter().any(|x| x.nvars != m) {
        return usage("U, P, Q and w must share the variable count");
    }
    let uw = eval_qdiff_polynomial(u, w)?;
    let pw = eval_qdiff_polynomial(p, w)?;
    let qw = eval_qdiff_polynomial(q, w)?;
    let up = SliceFunction::product(vec![uw, pw.clone()])?;
    let identity = check_identity(&up, &qw, m)?;

    let (deg_u, deg_q) = (u.total_degree(), q.total_degree());
    let mut hyps = vec![
        HypothesisCheck::from_bool(
            "deg Q <= deg U",
            deg_q <= deg_u,
            format!("deg Q = {deg_q}, deg U = {deg_u}"),
        ),
        HypothesisCheck::from_bool(
            "single top term in U",
            u.top_terms() == 1,
            format!("{} terms of degree {deg_u}", u.top_terms()),
        ),
        HypothesisCheck::from_bool(
            "diagonal shifts",
            u.all_diagonal() && p.all_diagonal() && q.all_diagonal(),
            "every q_s must be (q, ..., q)",
        ),
    ];

    let coeffs: Vec<&SliceFunction> = [u, p, q]
        .iter()
        .flat_map(|x| x.coefficients())
        .filter(|c| c.as_rational().and_then(|r| r.as_constant()).is_none())
        .collect();
    let mut funcs: Vec<&SliceFunction> = vec![w];
    let p_zero = pw.is_exact_zero();
    if !p_zero {
        funcs.push(&pw);
    }
    funcs.extend(coeffs.iter().copied());
    let b = LineBundle::sample(m, quad, &funcs, None)?;
    let radii = grid.radii();
    let sw = b.slice_stats(0, radii)?;
    let tw: Vec<f64> = (0..radii.len())
        .map(|i| sw.prox[i] + sw.n_pole[i])
        .collect();
    hyps.push(order_check(radii, &tw));
    let (mp, mp_err) = if p_zero {
        (vec![0.0; radii.len()], vec![0.0; radii.len()])
    } else {
        let s = b.slice_stats(1, radii)?;
        (s.prox, s.prox_err)
    };
    let off = if p_zero { 1 } else { 2 };
    let mut coefficient_ratios = Vec::new();
    let mut small = Some(true);
    for k in 0..coeffs.len() {
        let s = b.slice_stats(off + k, radii)?;
        let ratios: Vec<Option<f64>> = (0..radii.len())
            .map(|i| (tw[i] > RATIO_FLOOR).then(|| (s.prox[i] + s.n_pole[i]) / tw[i]))
            .collect();
        small = match (small, decays(&ratios, radii)) {
            (Some(a), Some(b)) => Some(a && b),
            _ => None,
        };
        coefficient_ratios.push(ratios);
    }
    hyps.push(match small {
        Some(ok) => HypothesisCheck::from_bool(
            "small coefficients",
            ok,
            "T(r, a)/T_w(r) decreasing on the grid for every non-constant coefficient",
        ),
        None => HypothesisCheck::new(
            "small coefficients",
            HypothesisStatus::Unchecked,
            "too few radii with T_w above the floor",
        ),
    });
    let rows: Vec<RatioSample> = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| RatioSample {
            r,
            numerator: mp[i],
            t: tw[i],
            ratio: (tw[i] > RATIO_FLOOR).then(|| mp[i] / tw[i]),
            err: mp_err[i] + sw.prox_err[i] + sw.count_err[i],
        })
        .collect();
    let ratios: Vec<Option<f64>> = rows.iter().map(|r| r.ratio).collect();
    let v = verdict(&hyps, decays(&ratios, radii));
    let mut notes = Vec::new();
    if v == Verdict::ReportOnly {
        notes.extend(
            super::report::unmet(&hyps)
                .into_iter()
                .map(|s| format!("report-only: {s}")),
        );
    }
    Ok(ClunieReport {
        identity,
        deg_u,
        deg_q,
        rows,
        coefficient_ratios,
        hypotheses: hyps,
        verdict: v,
        notes,
    })
}

/// Default floor for the fitted limit of `N(r, 1/G)/T_f(r)`.
pub const TUMURA_FLOOR: f64 = 0.01;
/// Below this everywhere, the zero/pole hypothesis counts as valid on the range.
pub const RANGE_VALID_TOL: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TumuraReport {
    /// `N(r, 1/G(z, f)) / T_f(r)`.
    pub rows: Vec<RatioSample>,
    /// `(N(r, 1/f) + N(r, f)) / T_f(r)`.
    pub hypothesis_ratio: Vec<Option<f64>>,
    /// Intercept of the ratio regressed on `1/log r`.
    pub fitted_limit: Option<f64>,
    pub floor: f64,
    /// Outcome of `fitted_limit > floor`, when the check ran.
    pub floor_check: Option<bool>,
    pub hypotheses: Vec<HypothesisCheck>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

/// Ratio `N(r, 1/G(z, f)) / T_f(r)` with the zero/pole-scarcity hypothesis
/// checked on the grid.
pub fn tumura_clunie_ratio(
    g: &QDiffPolynomial,
    f: &SliceFunction,
    grid: &RadialGrid,
    quad: &QuadratureSpec,
    floor: f64,
) -> Result<TumuraReport> {
    let m = f.nvars();
    if g.nvars != m {
        return usage("G and f must share the variable count");
    }
    if g.total_degree() == 0 {
        return usage("G has no term involving f");
    }
    let gf = eval_qdiff_polynomial(g, f)?;
    if gf.is_exact_zero() {
        return usage("G(z, f) vanishes identically");
    }
    let b = LineBundle::sample(m, quad, &[f, &gf], None)?;
    let radii = grid.radii();
    let sf = b.slice_stats(0, radii)?;
    let sg = b.slice_stats(1, radii)?;
    sf.require_countable()?;
    sg.require_countable()?;
    let t: Vec<f64> = (0..radii.len())
        .map(|i| sf.prox[i] + sf.n_pole[i])
        .collect();
    let hyp: Vec<Option<f64>> = (0..radii.len())
        .map(|i| (t[i] > RATIO_FLOOR).then(|| (sf.n_zero[i] + sf.n_pole[i]) / t[i]))
        .collect();
    let mut notes = Vec::new();
    let mut hyps = vec![
        HypothesisCheck::from_bool(
            "diagonal shifts",
            g.all_diagonal(),
            "every q_(lambda,j) must be (q, ..., q)",
        ),
        HypothesisCheck::from_bool(
            "proper shift",
            g.has_proper_shift(),
            "some q_(lambda,j) must differ from 1",
        ),
        order_check(radii, &t),
    ];
    let max_hyp = hyp
        .iter()
        .flatten()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let decaying = decays(&hyp, radii).unwrap_or(false)
        && match (
            hyp.first().copied().flatten(),
            hyp.last().copied().flatten(),
        ) {
            (Some(a), Some(z)) => z <= 0.5 * a,
            _ => false,
        };
    let range_valid = !decaying && hyp.iter().all(|h| h.is_some()) && max_hyp <= RANGE_VALID_TOL;
    hyps.push(if decaying {
        HypothesisCheck::verified("N(r,1/f) + N(r,f) = o(T_f)", "ratio decays on the grid")
    } else if range_valid {
        notes.push(format!(
            "zero/pole ratio at most {max_hyp:.3} but not decaying: hypothesis valid on the tested range only"
        ));
        HypothesisCheck::new(
            "N(r,1/f) + N(r,f) = o(T_f)",
            HypothesisStatus::Unchecked,
            format!("small on the range (max {max_hyp:.3}) without decay"),
        )
    } else {
        HypothesisCheck::failed(
            "N(r,1/f) + N(r,f) = o(T_f)",
            format!("zero/pole ratio not decaying (max {max_hyp:.3})"),
        )
    });
    let rows: Vec<RatioSample> = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| RatioSample {
            r,
            numerator: sg.n_zero[i],
            t: t[i],
            ratio: (t[i] > RATIO_FLOOR).then(|| sg.n_zero[i] / t[i]),
            err: sg.count_err[i] + sf.prox_err[i] + sf.count_err[i],
        })
        .collect();
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|row| row.ratio.map(|v| (1.0 / row.r.ln(), v)))
        .collect();
    let fitted_limit = (pts.len() >= 2).then(|| {
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let slope = ls_slope(&xs, &ys);
        let n = xs.len() as f64;
        ys.iter().sum::<f64>() / n - slope * xs.iter().sum::<f64>() / n
    });
    let run_floor = decaying || range_valid;
    let floor_check = if run_floor {
        fitted_limit.map(|l| l > floor)
    } else {
        None
    };
    let v = verdict(&hyps, floor_check);
    if v == Verdict::ReportOnly {
        notes.extend(
            super::report::unmet(&hyps)
                .into_iter()
                .map(|s| format!("report-only: {s}")),
        );
    }
    Ok(TumuraReport {
        rows,
        hypothesis_ratio: hyp,
        fitted_limit,
        floor,
        floor_check,
        hypotheses: hyps,
        verdict: v,
        notes,
    })
}
