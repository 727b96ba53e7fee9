use serde::Serialize;

use super::report::{verdict, HypothesisCheck, Verdict};
use crate::error::{usage, NevError, Result};
use crate::exactalg::{Polynomial, RationalFunction};
use crate::funcspace::{
    apply_form, check_general_position, HomogeneousForm, ProjectiveMap, SliceFunction,
};
use crate::linalg::rank_rational;
use crate::nevcore::{LineBundle, QuadratureSpec, RadialGrid};
use crate::qops::{casorati, q_periodic_test, shift_matrix, QShift};

/// One radius of the Gundersen–Hayman check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityRow {
    pub r: f64,
    /// `N(r, 1/L) − N(r, L)`.
    pub lhs: f64,
    /// `Σ_j N(r, 1/H_j(f)) − N(r, 1/C(f))`.
    pub rhs: f64,
    pub residual: f64,
    pub err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub rows: Vec<IdentityRow>,
    /// `max − min` of the residual over the grid.
    pub variation: f64,
    /// Sum of the certified errors at the two extreme residuals.
    pub err: f64,
}

/// Divisor identity for `L = Π_j H_j(f) / C(f)`:
/// `[N(r,1/L) − N(r,L)] − [Σ_j N(r,1/H_j(f)) − N(r,1/C(f))]`.
pub fn gundersen_hayman_identity(
    f: &ProjectiveMap,
    hyperplanes: &[HomogeneousForm],
    q: &QShift,
    grid: &RadialGrid,
    quad: &QuadratureSpec,
) -> Result<IdentityReport> {
    let m = f.nvars();
    let c = casorati(f.components(), q)?;
    if c.is_exact_zero() {
        return Err(NevError::Hypothesis("Casoratian identically zero".into()));
    }
    let hs: Vec<SliceFunction> = hyperplanes
        .iter()
        .map(|h| apply_form(h, f))
        .collect::<Result<_>>()?;
    if hs.iter().any(|h| h.is_exact_zero()) {
        return Err(NevError::MapInHypersurface(
            "some H_j(f) vanishes identically".into(),
        ));
    }
    let mut prod = vec![SliceFunction::constant(m, 1)];
    prod.extend(hs.iter().cloned());
    let l = SliceFunction::quotient(SliceFunction::product(prod)?, c.clone())?;
    let mut refs: Vec<&SliceFunction> = vec![&l, &c];
    refs.extend(hs.iter());
    let b = LineBundle::sample(m, quad, &refs, None)?;
    let radii = grid.radii();
    let sl = b.slice_stats(0, radii)?;
    let sc = b.slice_stats(1, radii)?;
    sl.require_countable()?;
    sc.require_countable()?;
    let sh = (0..hs.len())
        .map(|j| {
            let s = b.slice_stats(j + 2, radii)?;
            s.require_countable()?;
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<IdentityRow> = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let lhs = sl.n_zero[i] - sl.n_pole[i];
            let rhs = sh.iter().map(|s| s.n_zero[i]).sum::<f64>() - sc.n_zero[i];
            IdentityRow {
                r,
                lhs,
                rhs,
                residual: lhs - rhs,
                err: sl.count_err[i]
                    + sc.count_err[i]
                    + sh.iter().map(|s| s.count_err[i]).sum::<f64>(),
            }
        })
        .collect();
    let (lo, hi) = rows.iter().fold(
        (None::<&IdentityRow>, None::<&IdentityRow>),
        |(lo, hi), r| {
            (
                Some(lo.map_or(r, |l| if r.residual < l.residual { r } else { l })),
                Some(hi.map_or(r, |h| if r.residual > h.residual { r } else { h })),
            )
        },
    );
    let (variation, err) = match (lo, hi) {
        (Some(l), Some(h)) => (h.residual - l.residual, l.err + h.err),
        _ => (0.0, 0.0),
    };
    Ok(IdentityReport {
        rows,
        variation,
        err,
    })
}

/// `g(z) | g(qz)`: the zero multiset of `g` is mapped into itself by `z ↦ qz`.
pub fn forward_invariance_check(g: &Polynomial, q: &QShift) -> Result<bool> {
    if g.is_zero() {
        return usage("forward invariance of the zero polynomial");
    }
    if q.nvars() != g.nvars() {
        return usage("q-shift and polynomial differ in variable count");
    }
    let shifted = g.scale_vars(&q.power(1));
    Ok(shifted.div_exact(g)?.is_some())
}

/// A pair found in the same class, with its q-invariant ratio.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioWitness {
    pub i: usize,
    pub j: usize,
    pub ratio: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionResult {
    pub classes: Vec<Vec<usize>>,
    pub witnesses: Vec<RatioWitness>,
    pub l: usize,
}

impl PartitionResult {
    pub fn class_of(&self, i: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&i))
    }
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut k = i;
    while parent[k] != r {
        let next = parent[k];
        parent[k] = r;
        k = next;
    }
    r
}

/// Classes of `i ~ j ⟺ f_i / f_j(qz) = f_i / f_j(z)` for rational components.
///
/// Rational ratios are of zero order, so q-invariance is the only condition
/// for membership in the zero-order invariant field.
pub fn partition_by_q_ratio(components: &[SliceFunction], q: &QShift) -> Result<PartitionResult> {
    let rats: Vec<&RationalFunction> = components
        .iter()
        .map(|c| {
            c.as_rational().ok_or_else(|| {
                NevError::Unsupported(format!(
                    "partition needs rational components, got {}",
                    c.describe()
                ))
            })
        })
        .collect::<Result<_>>()?;
    if let Some(i) = rats.iter().position(|r| r.is_zero()) {
        return usage(format!("component {i} is identically zero"));
    }
    let k = rats.len();
    let mut parent: Vec<usize> = (0..k).collect();
    let mut witnesses = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let ratio = rats[i].div(rats[j])?;
            if q_periodic_test(&ratio.clone().into(), q)? {
                witnesses.push(RatioWitness {
                    i,
                    j,
                    ratio: ratio.to_string(),
                });
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for i in 0..k {
        let r = find(&mut parent, i);
        match roots.iter().position(|&x| x == r) {
            Some(c) => classes[c].push(i),
            None => {
                roots.push(r);
                classes.push(vec![i]);
            }
        }
    }
    let l = classes.len();
    Ok(PartitionResult {
        classes,
        witnesses,
        l,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PicardReport {
    /// `H_j(f)` as polynomials.
    pub compositions: Vec<String>,
    /// Forward invariance of each `H_j(f)`.
    pub invariant: Vec<bool>,
    /// Indices `j` whose preimage is not forward invariant.
    pub failed: Vec<usize>,
    pub hypotheses: Vec<HypothesisCheck>,
    /// Classes of the `H_j(f)` under q-invariant ratios.
    pub partition: PartitionResult,
    /// `⌊n / p̂⌋` with `p̂ = min(p − n, n + 1)`, when `p ≥ n + 2`.
    pub dimension_bound: Option<usize>,
    /// Projective dimension of the span of the components over the
    /// q-invariant rational functions (Casorati rank − 1).
    pub observed_dimension: usize,
    /// `f(qz) ≡ f(z)` projectively, tested when `p > n + 1`.
    pub q_invariant_map: Option<bool>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

/// `f(qz)` and `f(z)` define the same projective map:
/// `f_i(qz) f_j(z) = f_j(qz) f_i(z)` for all `i < j`.
pub fn projectively_q_invariant(f: &[Polynomial], q: &QShift) -> Result<bool> {
    let qq = q.power(1);
    let s: Vec<Polynomial> = f.iter().map(|p| p.scale_vars(&qq)).collect();
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            if s[i].checked_mul(&f[j])? != s[j].checked_mul(&f[i])? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Forward-invariance hypotheses and the Picard-type conclusions for a
/// polynomial map and hyperplanes.
pub fn picard_check(
    f: &ProjectiveMap,
    hyperplanes: &[HomogeneousForm],
    q: &QShift,
) -> Result<PicardReport> {
    let comps = f
        .polynomials()
        .ok_or_else(|| NevError::Unsupported("picard check needs polynomial components".into()))?;
    let n = f.target_dim();
    let p = hyperplanes.len();
    if let Some(h) = hyperplanes.iter().find(|h| h.degree() != 1) {
        return usage(format!("{} is not a hyperplane", h.display()));
    }
    let gp = check_general_position(hyperplanes, n)?;
    let mut hyps = vec![HypothesisCheck::from_bool(
        "general position",
        gp.in_general_position,
        match &gp.witness {
            None => "every n+1 hyperplanes are independent".to_string(),
            Some(w) => format!("hyperplanes {:?} meet", w.subset),
        },
    )];
    hyps.push(HypothesisCheck::from_bool(
        "diagonal q",
        q.is_diagonal(),
        "required for the invariant-field arguments",
    ));
    let mut gs = Vec::with_capacity(p);
    for (j, h) in hyperplanes.iter().enumerate() {
        let g = apply_form(h, f)?;
        let g = g
            .as_polynomial()
            .cloned()
            .ok_or_else(|| NevError::Unsupported(format!("H{j}(f) is not a polynomial")))?;
        if g.is_zero() {
            return Err(NevError::MapInHypersurface(format!(
                "the image lies in hyperplane {j}"
            )));
        }
        gs.push(g);
    }
    let invariant: Vec<bool> = gs
        .iter()
        .map(|g| forward_invariance_check(g, q))
        .collect::<Result<_>>()?;
    let failed: Vec<usize> = (0..p).filter(|&j| !invariant[j]).collect();
    hyps.push(HypothesisCheck::from_bool(
        "forward invariant preimages",
        failed.is_empty(),
        if failed.is_empty() {
            "H_j(f) divides H_j(f)(qz) for every j".to_string()
        } else {
            format!("not forward invariant for j in {failed:?}")
        },
    ));
    let gfs: Vec<SliceFunction> = gs.iter().cloned().map(Into::into).collect();
    let partition = partition_by_q_ratio(&gfs, q)?;

    let rats: Vec<RationalFunction> = comps
        .iter()
        .cloned()
        .map(RationalFunction::from_poly)
        .collect();
    let rank = rank_rational(&shift_matrix(&rats, q))?;
    let observed_dimension = rank.saturating_sub(1);
    let mut notes = Vec::new();
    let dimension_bound = (p >= n + 2).then(|| {
        let phat = (p - n).min(n + 1);
        n / phat
    });
    let q_invariant_map = if p > n + 1 {
        Some(projectively_q_invariant(&comps, q)?)
    } else {
        notes.push("p <= n + 1: no conclusion to test".into());
        None
    };
    let holds = match (dimension_bound, q_invariant_map) {
        (Some(b), Some(inv)) => Some(observed_dimension <= b && inv),
        (Some(b), None) => Some(observed_dimension <= b),
        (None, Some(inv)) => Some(inv),
        (None, None) => None,
    };
    let v = verdict(&hyps, holds);
    if v == Verdict::ReportOnly {
        notes.extend(
            super::report::unmet(&hyps)
                .into_iter()
                .map(|u| format!("report-only: {u}")),
        );
    }
    Ok(PicardReport {
        compositions: gs.iter().map(|g| g.to_string()).collect(),
        invariant,
        failed,
        hypotheses: hyps,
        partition,
        dimension_bound,
        observed_dimension,
        q_invariant_map,
        verdict: v,
        notes,
    })
}
