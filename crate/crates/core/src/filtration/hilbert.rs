use serde::Serialize;

use crate::error::{usage, Result};
use crate::funcspace::{dim_v, ideal_slice_dim, HomogeneousForm};

/// Outcome of scanning the Hilbert function of `(γ_1, …, γ_k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HilbertVerdict {
    /// `n` forms meeting in finitely many points.
    ZeroDimensional,
    /// `n+1` forms with no common zero.
    Empty,
    /// No stabilization at the expected value within the scanned range.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HilbertReport {
    pub verdict: HilbertVerdict,
    /// First scanned degree from which the quotient dimension is constant.
    pub alpha0: Option<u32>,
    pub stable_value: Option<usize>,
    /// Expected stable value: `∏ deg γ_j` for `n` forms, 0 for `n+1`.
    pub expected: usize,
    /// `(α, dim V_α / (γ) ∩ V_α)` for each scanned degree.
    pub values: Vec<(u32, usize)>,
}

impl HilbertReport {
    pub fn is_zero_dimensional(&self) -> bool {
        self.verdict == HilbertVerdict::ZeroDimensional
    }
}

/// `dim V_α / ((γ) ∩ V_α)`.
pub fn hilbert_value(gammas: &[HomogeneousForm], nplus1: usize, alpha: u32) -> Result<usize> {
    Ok(dim_v(nplus1, alpha) - ideal_slice_dim(gammas, alpha)?)
}

/// Coefficients of `∏(1 − t^{d_j}) / (1 − t)^{n+1}` up to `t^top`, the
/// Hilbert function of a complete intersection.
pub fn complete_intersection_series(degrees: &[u32], nplus1: usize, top: u32) -> Vec<i64> {
    let len = top as usize + 1;
    let mut num = vec![0i64; len];
    num[0] = 1;
    for &d in degrees {
        for k in (0..len).rev() {
            if k >= d as usize {
                num[k] -= num[k - d as usize];
            }
        }
    }
    // divide by (1 − t) n+1 times: prefix sums
    for _ in 0..nplus1 {
        for k in 1..len {
            num[k] += num[k - 1];
        }
    }
    num
}

/// Scan the Hilbert function in degrees `min d_j, …, Σ(d_j − 1) + 2`.
///
/// With `n` forms in `n+1` variables the forms meet in finitely many points
/// exactly when they form a complete intersection, which the scan detects
/// by matching the complete-intersection series; the stable value is then
/// `∏ d_j`. With `n+1` forms the set is empty exactly when the value at
/// `Σ(d_j − 1) + 1` is 0.
pub fn hilbert_stabilization(gammas: &[HomogeneousForm]) -> Result<HilbertReport> {
    if gammas.is_empty() {
        return usage("no forms");
    }
    let n1 = gammas[0].nplus1();
    if gammas.iter().any(|g| g.nplus1() != n1) {
        return usage("forms in different numbers of variables");
    }
    let k = gammas.len();
    if k + 1 != n1 && k != n1 {
        return usage(format!(
            "{k} forms in {n1} variables: expected {} (finite intersection) or {n1} (empty intersection)",
            n1 - 1
        ));
    }
    let degrees: Vec<u32> = gammas.iter().map(|g| g.degree()).collect();
    let start = *degrees.iter().min().unwrap();
    let top = degrees.iter().map(|d| d - 1).sum::<u32>() + 2;
    let values: Vec<(u32, usize)> = (start..=top)
        .map(|a| Ok((a, hilbert_value(gammas, n1, a)?)))
        .collect::<Result<_>>()?;
    let expected = if k == n1 {
        0
    } else {
        degrees.iter().map(|&d| d as usize).product()
    };
    let last = values.last().unwrap().1;
    let alpha0 = {
        let mut i = values.len() - 1;
        while i > 0 && values[i - 1].1 == last {
            i -= 1;
        }
        // a plateau of one point is not a stabilization
        (i + 1 < values.len()).then_some(values[i].0)
    };
    let verdict = if k == n1 {
        let at_bound = values[values.len() - 2].1;
        if at_bound == 0 {
            HilbertVerdict::Empty
        } else {
            HilbertVerdict::Inconclusive
        }
    } else {
        let ci = complete_intersection_series(&degrees, n1, top);
        let matches = values.iter().all(|&(a, v)| v as i64 == ci[a as usize]);
        if matches && last == expected {
            HilbertVerdict::ZeroDimensional
        } else {
            HilbertVerdict::Inconclusive
        }
    };
    Ok(HilbertReport {
        verdict,
        alpha0,
        stable_value: alpha0.map(|_| last),
        expected,
        values,
    })
}
