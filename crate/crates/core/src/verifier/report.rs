use serde::Serialize;

use crate::nevcore::ls_slope;

/// Default floor for the `margin / T` trend.
pub const TREND_FLOOR: f64 = -0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisStatus {
    Verified,
    Failed,
    /// Not decidable on the given inputs (for example a grid too short for
    /// an order estimate).
    Unchecked,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub status: HypothesisStatus,
    pub detail: String,
}

impl HypothesisCheck {
    pub fn new(name: &str, status: HypothesisStatus, detail: impl Into<String>) -> Self {
        HypothesisCheck {
            name: name.into(),
            status,
            detail: detail.into(),
        }
    }

    pub fn verified(name: &str, detail: impl Into<String>) -> Self {
        Self::new(name, HypothesisStatus::Verified, detail)
    }

    pub fn failed(name: &str, detail: impl Into<String>) -> Self {
        Self::new(name, HypothesisStatus::Failed, detail)
    }

    pub fn from_bool(name: &str, ok: bool, detail: impl Into<String>) -> Self {
        let s = if ok {
            HypothesisStatus::Verified
        } else {
            HypothesisStatus::Failed
        };
        Self::new(name, s, detail)
    }
}

/// Overall outcome of a harness run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Some hypothesis was not machine-verified; the data carry no judgment.
    ReportOnly,
}

/// True when every hypothesis is verified.
pub fn all_verified(h: &[HypothesisCheck]) -> bool {
    h.iter().all(|c| c.status == HypothesisStatus::Verified)
}

/// Names of the hypotheses that are not verified.
pub fn unmet(h: &[HypothesisCheck]) -> Vec<String> {
    h.iter()
        .filter(|c| c.status != HypothesisStatus::Verified)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect()
}

/// One radius of an inequality check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SmtRow {
    pub r: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub margin: f64,
    pub err: f64,
    /// Margin with the leading-order Casoratian coefficient, when one applies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin_asymptotic: Option<f64>,
}

/// A named per-radius series entering one side of an inequality.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Term {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmtReport {
    pub theorem: String,
    pub rows: Vec<SmtRow>,
    pub terms: Vec<Term>,
    pub hypotheses: Vec<HypothesisCheck>,
    /// Limit estimate of `margin / T` over the top decade of the grid.
    pub trend: Option<f64>,
    pub trend_floor: f64,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl SmtReport {
    pub fn margins(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.margin).collect()
    }

    pub fn min_margin(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.margin)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Slope of `margin` regressed on `T` over radii in `[r_max/10, r_max]`.
///
/// A bounded margin gives a slope near 0 and a margin of `−εT + O(1)`
/// gives `−ε`, so the slope estimates the limit of `margin / T`. With a
/// single radius in the top decade the plain quotient is returned; with
/// `T` flat the estimate is undefined.
pub fn margin_trend(rows: &[SmtRow]) -> Option<f64> {
    let rmax = rows.iter().map(|r| r.r).fold(f64::NEG_INFINITY, f64::max);
    let top: Vec<&SmtRow> = rows.iter().filter(|r| r.r >= rmax / 10.0).collect();
    match top.len() {
        0 => None,
        1 => (top[0].t.abs() > 1e-8).then(|| top[0].margin / top[0].t),
        _ => {
            let ts: Vec<f64> = top.iter().map(|r| r.t).collect();
            let spread = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - ts.iter().cloned().fold(f64::INFINITY, f64::min);
            if spread < 1e-6 {
                return None;
            }
            let ms: Vec<f64> = top.iter().map(|r| r.margin).collect();
            Some(ls_slope(&ts, &ms))
        }
    }
}

pub(crate) fn verdict(hypotheses: &[HypothesisCheck], holds: Option<bool>) -> Verdict {
    match (all_verified(hypotheses), holds) {
        (true, Some(true)) => Verdict::Pass,
        (true, Some(false)) => Verdict::Fail,
        _ => Verdict::ReportOnly,
    }
}
