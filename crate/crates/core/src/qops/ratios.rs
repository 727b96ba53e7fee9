use serde::Serialize;

use super::shift::QShift;
use crate::error::{usage, NevError, Result};
use crate::funcspace::SliceFunction;
use crate::nevcore::{order_estimate, LineBundle, QuadratureSpec, RadialGrid};

/// Below this a characteristic or counting value is treated as zero.
pub const RATIO_FLOOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    pub r: f64,
    pub numerator: f64,
    pub denominator: f64,
    /// `None` where the denominator is below [`RATIO_FLOOR`].
    pub ratio: Option<f64>,
    pub err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioReport {
    pub rows: Vec<RatioRow>,
    /// Order estimate of the subject function, when the grid allows one.
    pub order: Option<f64>,
    /// Set when a guard was lifted; no correctness claim attaches.
    pub exploratory: bool,
    pub notes: Vec<String>,
}

impl RatioReport {
    pub fn ratios(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.ratio).collect()
    }
}

fn rows(radii: &[f64], num: &[f64], den: &[f64], err: &[f64]) -> Vec<RatioRow> {
    radii
        .iter()
        .enumerate()
        .map(|(t, &r)| RatioRow {
            r,
            numerator: num[t],
            denominator: den[t],
            ratio: (den[t] > RATIO_FLOOR).then(|| num[t] / den[t]),
            err: err[t],
        })
        .collect()
}

/// `m(r, h(qz)/h(z)) / T(r, h)` on the grid.
///
/// Requires a diagonal `q` unless `allow_general_q` is set, in which case
/// the report is marked exploratory.
pub fn ldl_ratio(
    h: &SliceFunction,
    q: &QShift,
    grid: &RadialGrid,
    quad: &QuadratureSpec,
    allow_general_q: bool,
) -> Result<RatioReport> {
    if q.nvars() != h.nvars() {
        return usage("q-shift and function differ in variable count");
    }
    let mut notes = Vec::new();
    if !q.is_diagonal() {
        if !allow_general_q {
            return Err(NevError::Hypothesis(
                "the logarithmic difference lemma is only established for diagonal q".into(),
            ));
        }
        notes.push("non-diagonal q: exploratory run without the diagonal guard".into());
    }
    if h.as_rational().and_then(|r| r.as_constant()).is_some() {
        return Err(NevError::Hypothesis(
            "T below floor: a constant function has bounded characteristic".into(),
        ));
    }
    let quotient = SliceFunction::quotient(h.qscale(q, 1), h.clone())?;
    let b = LineBundle::sample(h.nvars(), quad, &[h, &quotient], None)?;
    let radii = grid.radii();
    let sh = b.slice_stats(0, radii)?;
    let sq = b.slice_stats(1, radii)?;
    let t: Vec<f64> = (0..radii.len())
        .map(|i| sh.prox[i] + sh.n_pole[i])
        .collect();
    if t.iter().all(|v| *v < RATIO_FLOOR) {
        return Err(NevError::Hypothesis(
            "T below floor on the whole grid: the ratio is undefined (constant function?)".into(),
        ));
    }
    let err: Vec<f64> = (0..radii.len())
        .map(|i| sq.prox_err[i] + sh.prox_err[i] + sh.count_err[i])
        .collect();
    let order = (radii.len() >= 4)
        .then(|| order_estimate(radii, &t))
        .transpose()?;
    if let Some(o) = order {
        if o >= crate::nevcore::ZERO_ORDER_THRESHOLD {
            notes.push(format!("order estimate {o:.3} is not near zero"));
        }
    }
    Ok(RatioReport {
        rows: rows(radii, &sq.prox, &t, &err),
        order,
        exploratory: !q.is_diagonal(),
        notes,
    })
}

/// `N(r, h(qz)) / N(r, h(z))`, counting poles.
pub fn shift_counting_ratio(
    h: &SliceFunction,
    q: &QShift,
    grid: &RadialGrid,
    quad: &QuadratureSpec,
) -> Result<RatioReport> {
    if q.nvars() != h.nvars() {
        return usage("q-shift and function differ in variable count");
    }
    let shifted = h.qscale(q, 1);
    let b = LineBundle::sample(h.nvars(), quad, &[h, &shifted], None)?;
    let radii = grid.radii();
    let base = b.slice_stats(0, radii)?;
    let sh = b.slice_stats(1, radii)?;
    base.require_countable()?;
    sh.require_countable()?;
    let mut notes = Vec::new();
    let zero_rows = base.n_pole.iter().filter(|v| **v <= RATIO_FLOOR).count();
    if zero_rows > 0 {
        notes.push(format!(
            "N(r, h) vanishes at {zero_rows} radii; ratio undefined there (pass 1/h to count zeros)"
        ));
    }
    let t: Vec<f64> = (0..radii.len())
        .map(|i| base.prox[i] + base.n_pole[i])
        .collect();
    let order = (radii.len() >= 4)
        .then(|| order_estimate(radii, &t))
        .transpose()?;
    let err: Vec<f64> = (0..radii.len())
        .map(|i| base.count_err[i] + sh.count_err[i])
        .collect();
    Ok(RatioReport {
        rows: rows(radii, &sh.n_pole, &base.n_pole, &err),
        order,
        exploratory: false,
        notes,
    })
}
