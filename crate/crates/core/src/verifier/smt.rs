use serde::Serialize;

use super::report::{
    margin_trend, unmet, verdict, HypothesisCheck, HypothesisStatus, SmtReport, SmtRow, Term,
    TREND_FLOOR,
};
use crate::error::{usage, NevError, Result};
use crate::exactalg::{GaussianRational, MultiIndex};
use crate::filtration::{build_filtration, delta_totals, hilbert_stabilization, HilbertVerdict};
use crate::funcspace::{
    apply_form, check_general_position, subsets, HomogeneousForm, ProjectiveMap, SliceFunction,
};
use crate::linalg::rank_exact;
use crate::nevcore::{
    characteristic_on, order_estimate, weil_at, LineBundle, QuadratureSpec, RadialGrid, Sample,
    SliceStats, ZERO_ORDER_THRESHOLD,
};
use crate::qops::{
    algebraic_nondegeneracy, casorati, casorati_monomials, linear_nondegeneracy, Degeneracy,
    NondegeneracyReport, NumericTest, QShift, MONOMIAL_CAP,
};

/// Knobs shared by the inequality harnesses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmtOptions {
    /// Lowest accepted limit estimate of `margin / T`.
    pub trend_floor: f64,
    pub numeric: NumericTest,
}

impl Default for SmtOptions {
    fn default() -> Self {
        SmtOptions {
            trend_floor: TREND_FLOOR,
            numeric: NumericTest::default(),
        }
    }
}

fn check_forms(f: &ProjectiveMap, forms: &[HomogeneousForm], linear: bool) -> Result<usize> {
    let n = f.target_dim();
    if forms.is_empty() {
        return usage("no hyperplanes or hypersurfaces given");
    }
    for (j, h) in forms.iter().enumerate() {
        if h.nplus1() != n + 1 {
            return usage(format!(
                "form {j} has {} variables but the map has {} components",
                h.nplus1(),
                n + 1
            ));
        }
        if linear && h.degree() != 1 {
            return usage(format!(
                "form {j} has degree {}, expected a hyperplane",
                h.degree()
            ));
        }
    }
    Ok(n)
}

fn general_position(forms: &[HomogeneousForm], n: usize) -> Result<HypothesisCheck> {
    let gp = check_general_position(forms, n)?;
    Ok(match gp.witness {
        None => {
            HypothesisCheck::verified("general position", "every n+1 forms have no common zero")
        }
        Some(w) => HypothesisCheck::failed(
            "general position",
            format!("forms {:?} have a common zero", w.subset),
        ),
    })
}

fn nondegeneracy(kind: &str, rep: &NondegeneracyReport) -> HypothesisCheck {
    let name = format!("{kind} nondegeneracy");
    match rep.verdict {
        Degeneracy::Nondegenerate => HypothesisCheck::verified(
            &name,
            if rep.symbolic {
                "Casoratian is a nonzero rational function".to_string()
            } else {
                format!(
                    "Casoratian nonzero at a sample (relative size {:.3e})",
                    rep.max_relative.unwrap_or(0.0)
                )
            },
        ),
        Degeneracy::Degenerate => HypothesisCheck::failed(&name, "Casoratian identically zero"),
        Degeneracy::LikelyDegenerate => HypothesisCheck::failed(
            &name,
            "Casoratian below threshold at every sample (likely identically zero)",
        ),
    }
}

fn diagonal(q: &QShift) -> HypothesisCheck {
    HypothesisCheck::from_bool(
        "diagonal q",
        q.is_diagonal(),
        if q.is_diagonal() {
            "q = (q, ..., q)"
        } else {
            "entries of q differ"
        },
    )
}

fn zero_order(radii: &[f64], t: &[Sample]) -> HypothesisCheck {
    if radii.len() < 4 {
        return HypothesisCheck::new(
            "zero order",
            HypothesisStatus::Unchecked,
            "grid too short for an order estimate (need 4 radii)",
        );
    }
    let tv: Vec<f64> = t.iter().map(|s| s.value).collect();
    match order_estimate(radii, &tv) {
        Ok(o) => HypothesisCheck::from_bool(
            "zero order",
            o < ZERO_ORDER_THRESHOLD,
            format!("order estimate {o:.3} (threshold {ZERO_ORDER_THRESHOLD})"),
        ),
        Err(e) => HypothesisCheck::new("zero order", HypothesisStatus::Unchecked, e.to_string()),
    }
}

fn composed(forms: &[HomogeneousForm], f: &ProjectiveMap) -> Result<Vec<SliceFunction>> {
    forms
        .iter()
        .enumerate()
        .map(|(j, h)| {
            let g = apply_form(h, f)?;
            if g.is_exact_zero() {
                return Err(NevError::MapInHypersurface(format!(
                    "form {j} ({}) vanishes identically on the map",
                    h.display()
                )));
            }
            Ok(g)
        })
        .collect()
}

/// Sample one bundle for `funcs` (and the Casoratian when it is nonzero)
/// and return `T_f`, the zero counts and the Casoratian count.
struct Sampled {
    t: Vec<Sample>,
    counts: Vec<SliceStats>,
    cas: Option<SliceStats>,
    bundle: LineBundle,
}

fn sample_all(
    f: &ProjectiveMap,
    funcs: &[SliceFunction],
    cas: &SliceFunction,
    grid: &RadialGrid,
    quad: &QuadratureSpec,
) -> Result<Sampled> {
    let mut refs: Vec<&SliceFunction> = funcs.iter().collect();
    let has_c = !cas.is_exact_zero();
    if has_c {
        refs.push(cas);
    }
    let bundle = LineBundle::sample(f.nvars(), quad, &refs, Some(f))?;
    let radii = grid.radii();
    let t = characteristic_on(&bundle, f, radii)?;
    let counts = (0..funcs.len())
        .map(|i| {
            let s = bundle.slice_stats(i, radii)?;
            s.require_countable()?;
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    let cas = if has_c {
        let s = bundle.slice_stats(funcs.len(), radii)?;
        s.require_countable()?;
        Some(s)
    } else {
        None
    };
    Ok(Sampled {
        t,
        counts,
        cas,
        bundle,
    })
}

fn finish(
    theorem: &str,
    rows: Vec<SmtRow>,
    terms: Vec<Term>,
    hypotheses: Vec<HypothesisCheck>,
    mut notes: Vec<String>,
    opts: &SmtOptions,
) -> SmtReport {
    let trend = margin_trend(&rows);
    let holds = trend.map(|t| t >= opts.trend_floor);
    let v = verdict(&hypotheses, holds);
    if v == super::Verdict::ReportOnly {
        for u in unmet(&hypotheses) {
            notes.push(format!("report-only: {u}"));
        }
        if trend.is_none() {
            notes.push("report-only: margin trend undefined (T flat on the top decade)".into());
        }
    }
    SmtReport {
        theorem: theorem.into(),
        rows,
        terms,
        hypotheses,
        trend,
        trend_floor: opts.trend_floor,
        verdict: v,
        notes,
    }
}

fn cas_term(s: &Sampled, k: usize) -> Vec<f64> {
    match &s.cas {
        Some(c) => c.n_zero.clone(),
        None => vec![0.0; k],
    }
}

/// Hyperplane second main theorem with the Casoratian counting term:
/// `(p − n − 1) T_f(r) ≤ Σ_j N(r, 1/P_j(f)) − N(r, 1/C(f))`.
pub fn verify_cartan_smt(
    f: &ProjectiveMap,
    hyperplanes: &[HomogeneousForm],
    q: &QShift,
    grid: &RadialGrid,
    quad: &QuadratureSpec,
    opts: &SmtOptions,
) -> Result<SmtReport> {
    let n = check_forms(f, hyperplanes, true)?;
    let p = hyperplanes.len();
    let mut hyps = vec![general_position(hyperplanes, n)?];
    hyps.push(nondegeneracy(
        "linear",
        &linear_nondegeneracy(f, q, opts.numeric)?,
    ));
    hyps.push(diagonal(q));
    let funcs = composed(hyperplanes, f)?;
    let c = casorati(f.components(), q)?;
    let s = sample_all(f, &funcs, &c, grid, quad)?;
    let radii = grid.radii();
    hyps.push(zero_order(radii, &s.t));
    let nc = cas_term(&s, radii.len());
    let k = p as f64 - n as f64 - 1.0;
    let rows = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let lhs = k * s.t[i].value;
            let sum: f64 = s.counts.iter().map(|c| c.n_zero[i]).sum();
            let rhs = sum - nc[i];
            let err = k.abs() * s.t[i].err
                + s.counts.iter().map(|c| c.count_err[i]).sum::<f64>()
                + s.cas.as_ref().map_or(0.0, |c| c.count_err[i]);
            SmtRow {
                r,
                t: s.t[i].value,
                lhs,
                rhs,
                margin: rhs - lhs,
                err,
                margin_asymptotic: None,
            }
        })
        .collect();
    let mut terms: Vec<Term> = s
        .counts
        .iter()
        .enumerate()
        .map(|(j, c)| Term {
            name: format!("N(r,1/H{j}(f))"),
            values: c.n_zero.clone(),
        })
        .collect();
    terms.push(Term {
        name: "N(r,1/C(f))".into(),
        values: nc,
    });
    let mut notes = Vec::new();
    if c.is_exact_zero() {
        notes.push("Casoratian identically zero; its counting term is omitted".into());
    }
    if p == n + 1 {
        notes.push("p = n + 1: the left side vanishes".into());
    }
    Ok(finish("cartan", rows, terms, hyps, notes, opts))
}

/// Coefficient vectors of hyperplanes.
fn coefficient_rows(hyperplanes: &[HomogeneousForm], n: usize) -> Vec<Vec<GaussianRational>> {
    hyperplanes
        .iter()
        .map(|h| {
            (0..=n)
                .map(|i| h.poly().coeff(&MultiIndex::unit(n + 1, i)))
                .collect()
        })
        .collect()
}

/// Index sets `K` of `n+1` hyperplanes with independent coefficient vectors.
pub fn admissible_subsets(hyperplanes: &[HomogeneousForm], n: usize) -> Vec<Vec<usize>> {
    let rows = coefficient_rows(hyperplanes, n);
    subsets(hyperplanes.len(), n + 1)
        .into_iter()
        .filter(|s| {
            let sub: Vec<Vec<GaussianRational>> = s.iter().map(|&i| rows[i].clone()).collect();
            rank_exact(&sub) == n + 1
        })
        .collect()
}

/// Weil-function form: `∫ max_K Σ_{k∈K} λ_{H_k}(f) ≤ (n+1) T_f(r) − N(r, 1/C(f))`.
pub fn verify_hsmt_weil(
    f: &ProjectiveMap,
    hyperplanes: &[HomogeneousForm],
    q: &QShift,
    grid: &RadialGrid,
    quad: &QuadratureSpec,
    opts: &SmtOptions,
) -> Result<SmtReport> {
    let n = check_forms(f, hyperplanes, true)?;
    let ks = admissible_subsets(hyperplanes, n);
    if ks.is_empty() {
        return usage("no n+1 of the hyperplanes are linearly independent");
    }
    let mut hyps = vec![general_position(hyperplanes, n)?];
    hyps.push(nondegeneracy(
        "linear",
        &linear_nondegeneracy(f, q, opts.numeric)?,
    ));
    hyps.push(diagonal(q));
    let c = casorati(f.components(), q)?;
    let s = sample_all(f, &[], &c, grid, quad)?;
    let radii = grid.radii();
    hyps.push(zero_order(radii, &s.t));
    let lam = s.bundle.sphere_means(radii, |z| {
        let l: Vec<f64> = hyperplanes.iter().map(|h| weil_at(f, h, z)).collect();
        ks.iter()
            .map(|k| k.iter().map(|&i| l[i]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    });
    let nc = cas_term(&s, radii.len());
    let n1 = (n + 1) as f64;
    let rows = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let lhs = lam.at[i];
            let rhs = n1 * s.t[i].value - nc[i];
            SmtRow {
                r,
                t: s.t[i].value,
                lhs,
                rhs,
                margin: rhs - lhs,
                err: lam.err[i] + n1 * s.t[i].err + s.cas.as_ref().map_or(0.0, |c| c.count_err[i]),
                margin_asymptotic: None,
            }
        })
        .collect();
    let terms = vec![
        Term {
            name: "mean max_K sum lambda".into(),
            values: lam.at.clone(),
        },
        Term {
            name: "N(r,1/C(f))".into(),
            values: nc,
        },
    ];
    let notes = vec![format!("{} admissible index sets K", ks.len())];
    Ok(finish("hsmt", rows, terms, hyps, notes, opts))
}

/// Sphere mean of the Weil function `λ_H(f(z))` at each radius.
pub fn weil_proximity(
    f: &ProjectiveMap,
    form: &HomogeneousForm,
    grid: &RadialGrid,
    quad: &QuadratureSpec,
) -> Result<Vec<Sample>> {
    check_forms(f, std::slice::from_ref(form), false)?;
    let g = composed(std::slice::from_ref(form), f)?;
    let b = LineBundle::sample(f.nvars(), quad, &[&g[0]], Some(f))?;
    let radii = grid.radii();
    let m = b.sphere_means(radii, |z| weil_at(f, form, z));
    Ok(radii
        .iter()
        .enumerate()
        .map(|(i, &r)| Sample {
            r,
            value: m.at[i],
            err: m.err[i],
        })
        .collect())
}

/// Casoratian coefficients of the hypersurface inequality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CasoratiCoefficients {
    /// `1/(d·Δ)` with `Δ` from the filtration.
    pub exact: Option<f64>,
    /// `(n+1)!/α^{n+1}`.
    pub asymptotic: f64,
    pub delta: Option<u64>,
}

fn lcm(a: u32, b: u32) -> u32 {
    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Hypersurface second main theorem:
/// `(p − n − 1) T_f(r) ≤ Σ_j N(r, 1/D_j(f))/d_j − c_α N(r, 1/C̃(f))`.
///
/// `c_α` is `1/(d·Δ)` with `Δ` computed from the filtration of the first
/// `n` forms lifted to degree `d = lcm(d_j)`; the margin with the
/// leading-order coefficient `(n+1)!/α^{n+1}` is reported alongside.
pub fn verify_hypersurface_smt(
    f: &ProjectiveMap,
    forms: &[HomogeneousForm],
    q: &QShift,
    alpha: u32,
    grid: &RadialGrid,
    quad: &QuadratureSpec,
    opts: &SmtOptions,
) -> Result<SmtReport> {
    let n = check_forms(f, forms, false)?;
    let p = forms.len();
    if p < n + 1 {
        return usage(format!(
            "need at least n+1 = {} hypersurfaces, got {p}",
            n + 1
        ));
    }
    let d = forms.iter().fold(1, |l, g| lcm(l, g.degree()));
    let mut hyps = Vec::new();
    let mut bad = None;
    for s in subsets(p, n + 1) {
        let sub: Vec<HomogeneousForm> = s.iter().map(|&i| forms[i].clone()).collect();
        if hilbert_stabilization(&sub)?.verdict != HilbertVerdict::Empty {
            bad = Some(s);
            break;
        }
    }
    hyps.push(match bad {
        None => HypothesisCheck::verified(
            "general position",
            "every n+1 forms have an empty common zero set (Hilbert function)",
        ),
        Some(s) => HypothesisCheck::failed(
            "general position",
            format!("forms {s:?} have a common zero"),
        ),
    });
    hyps.push(nondegeneracy(
        "algebraic",
        &algebraic_nondegeneracy(f, alpha, q, opts.numeric)?,
    ));
    hyps.push(HypothesisCheck::from_bool(
        "alpha divisible by d",
        alpha.is_multiple_of(d),
        format!("alpha = {alpha}, d = lcm(d_j) = {d}"),
    ));
    hyps.push(diagonal(q));

    let mut notes = Vec::new();
    let lifted: Vec<HomogeneousForm> = forms[..n].iter().map(|g| g.pow(d / g.degree())).collect();
    let delta = match build_filtration(&lifted, alpha) {
        Ok(fl) => Some(delta_totals(&fl)?.delta),
        Err(NevError::Hypothesis(m)) => {
            notes.push(format!("no filtration for the first n forms: {m}"));
            None
        }
        Err(e) => return Err(e),
    };
    let fact: f64 = (1..=n + 1).map(|k| k as f64).product();
    let coeffs = CasoratiCoefficients {
        exact: delta
            .filter(|&v| v > 0)
            .map(|v| 1.0 / (d as f64 * v as f64)),
        asymptotic: fact / (alpha as f64).powi(n as i32 + 1),
        delta,
    };
    notes.push(format!(
        "Casoratian coefficient: exact {}, leading order {:.6e}",
        coeffs
            .exact
            .map_or("unavailable".to_string(), |c| format!("{c:.6e}")),
        coeffs.asymptotic
    ));
    let c_exact = coeffs.exact.unwrap_or(coeffs.asymptotic);

    let funcs = composed(forms, f)?;
    let c = casorati_monomials(f, alpha, q, MONOMIAL_CAP)?;
    let s = sample_all(f, &funcs, &c, grid, quad)?;
    let radii = grid.radii();
    hyps.push(zero_order(radii, &s.t));
    let nc = cas_term(&s, radii.len());
    let k = p as f64 - n as f64 - 1.0;
    let rows = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let lhs = k * s.t[i].value;
            let sum: f64 = s
                .counts
                .iter()
                .zip(forms)
                .map(|(c, g)| c.n_zero[i] / g.degree() as f64)
                .sum();
            let rhs = sum - c_exact * nc[i];
            let rhs_asym = sum - coeffs.asymptotic * nc[i];
            let err = k.abs() * s.t[i].err
                + s.counts
                    .iter()
                    .zip(forms)
                    .map(|(c, g)| c.count_err[i] / g.degree() as f64)
                    .sum::<f64>()
                + s.cas
                    .as_ref()
                    .map_or(0.0, |cs| c_exact.max(coeffs.asymptotic) * cs.count_err[i]);
            SmtRow {
                r,
                t: s.t[i].value,
                lhs,
                rhs,
                margin: rhs - lhs,
                err,
                margin_asymptotic: Some(rhs_asym - lhs),
            }
        })
        .collect();
    let mut terms: Vec<Term> = s
        .counts
        .iter()
        .enumerate()
        .map(|(j, c)| Term {
            name: format!("N(r,1/D{j}(f))"),
            values: c.n_zero.clone(),
        })
        .collect();
    terms.push(Term {
        name: "N(r,1/C~(f))".into(),
        values: nc,
    });
    if c.is_exact_zero() {
        notes.push("generalized Casoratian identically zero; its counting term is omitted".into());
    }
    Ok(finish("hypersurface", rows, terms, hyps, notes, opts))
}
