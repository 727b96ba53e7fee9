use std::collections::HashMap;

use serde::Serialize;

use super::map::HomogeneousForm;
use crate::error::{usage, Result};
use crate::exactalg::{GaussianRational, MultiIndex, Polynomial};
use crate::linalg::{kernel_vector, SparseEchelon, SparseVec};

/// Coordinates on `V_α`, the degree-α forms in `n+1` variables, indexed by
/// monomials in descending lex order.
#[derive(Clone, Debug)]
pub struct MonomialSpace {
    nvars: usize,
    degree: u32,
    monomials: Vec<MultiIndex>,
    index: HashMap<MultiIndex, usize>,
}

impl MonomialSpace {
    pub fn new(nvars: usize, degree: u32) -> Self {
        let monomials = MultiIndex::all_of_degree(nvars, degree);
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        MonomialSpace {
            nvars,
            degree,
            monomials,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn monomials(&self) -> &[MultiIndex] {
        &self.monomials
    }

    /// Coordinates of a form of this degree.
    pub fn coords(&self, p: &Polynomial) -> SparseVec {
        p.terms()
            .iter()
            .map(|(e, c)| {
                let i = *self
                    .index
                    .get(e)
                    .unwrap_or_else(|| panic!("monomial {:?} not of degree {}", e.0, self.degree));
                (i, c.clone())
            })
            .collect()
    }
}

/// `C(a+n, n)` for `n+1` variables in degree `a`.
pub fn binom(n: u64, k: u64) -> u64 {
    let k = k.min(n.saturating_sub(k));
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

pub fn dim_v(nplus1: usize, alpha: u32) -> usize {
    if nplus1 == 0 {
        return 0;
    }
    binom(alpha as u64 + nplus1 as u64 - 1, nplus1 as u64 - 1) as usize
}

/// Rank of `{γ_j·μ : μ monomial of degree α − deg γ_j}` inside `V_α`.
pub fn ideal_slice_dim(gammas: &[HomogeneousForm], alpha: u32) -> Result<usize> {
    if gammas.is_empty() {
        return Ok(0);
    }
    let n1 = gammas[0].nplus1();
    if gammas.iter().any(|g| g.nplus1() != n1) {
        return usage("forms in different numbers of variables");
    }
    let space = MonomialSpace::new(n1, alpha);
    let mut ech = SparseEchelon::new();
    for g in gammas {
        if g.degree() > alpha {
            continue;
        }
        for mu in MultiIndex::all_of_degree(n1, alpha - g.degree()) {
            ech.insert(space.coords(&g.poly().shift(&mu)));
            if ech.rank() == space.dim() {
                return Ok(ech.rank());
            }
        }
    }
    Ok(ech.rank())
}

/// A subset of forms with a common zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositionWitness {
    pub subset: Vec<usize>,
    /// Quotient dimension at the Macaulay degree; positive means a common zero.
    pub quotient_dim: usize,
    pub macaulay_degree: u32,
    /// An explicit common zero, available when the subset is linear.
    pub common_zero: Option<Vec<GaussianRational>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneralPositionResult {
    pub in_general_position: bool,
    pub witness: Option<PositionWitness>,
}

pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Whether every `n+1` of the forms have no common zero in `ℙ^n`.
///
/// `n+1` forms without a common zero generate every monomial of degree
/// `Σ(d_j − 1) + 1`, and forms with a common zero never do, so one exact rank
/// per subset decides the question.
pub fn check_general_position(
    forms: &[HomogeneousForm],
    n: usize,
) -> Result<GeneralPositionResult> {
    if forms.len() < n + 1 {
        return usage(format!(
            "general position in P^{n} needs at least {} forms, got {}",
            n + 1,
            forms.len()
        ));
    }
    if let Some(f) = forms.iter().find(|f| f.nplus1() != n + 1) {
        return usage(format!(
            "form {} has {} variables, expected {}",
            f.display(),
            f.nplus1(),
            n + 1
        ));
    }
    for s in subsets(forms.len(), n + 1) {
        let sub: Vec<HomogeneousForm> = s.iter().map(|&i| forms[i].clone()).collect();
        let bound: u32 = sub.iter().map(|g| g.degree() - 1).sum::<u32>() + 1;
        let full = dim_v(n + 1, bound);
        let rank = ideal_slice_dim(&sub, bound)?;
        if rank < full {
            let common_zero = if sub.iter().all(|g| g.degree() == 1) {
                let rows: Vec<Vec<GaussianRational>> = sub
                    .iter()
                    .map(|g| {
                        (0..=n)
                            .map(|i| g.poly().coeff(&MultiIndex::unit(n + 1, i)))
                            .collect()
                    })
                    .collect();
                kernel_vector(&rows, n + 1)
            } else {
                None
            };
            return Ok(GeneralPositionResult {
                in_general_position: false,
                witness: Some(PositionWitness {
                    subset: s,
                    quotient_dim: full - rank,
                    macaulay_degree: bound,
                    common_zero,
                }),
            });
        }
    }
    Ok(GeneralPositionResult {
        in_general_position: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Polynomial {
        Polynomial::var(3, i)
    }

    fn form(p: Polynomial) -> HomogeneousForm {
        HomogeneousForm::from_poly(p).unwrap()
    }

    #[test]
    fn four_lines_in_general_position() {
        let fs: Vec<_> = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]]
            .iter()
            .map(|c| HomogeneousForm::hyperplane_ints(c).unwrap())
            .collect();
        assert!(check_general_position(&fs, 2).unwrap().in_general_position);
    }

    #[test]
    fn concurrent_lines_report_common_point() {
        let fs: Vec<_> = [[1, 0, 0], [0, 1, 0], [1, 1, 0]]
            .iter()
            .map(|c| HomogeneousForm::hyperplane_ints(c).unwrap())
            .collect();
        let r = check_general_position(&fs, 2).unwrap();
        assert!(!r.in_general_position);
        let w = r.witness.unwrap();
        let z = w.common_zero.unwrap();
        // direct substitution: every form vanishes at the witness
        for f in &fs {
            assert!(f.poly().eval_exact(&z).is_zero());
        }
        assert_eq!(
            z,
            vec![
                GaussianRational::zero(),
                GaussianRational::zero(),
                GaussianRational::one()
            ]
        );
    }

    #[test]
    fn too_few_forms() {
        let fs = vec![HomogeneousForm::hyperplane_ints(&[1, 0, 0]).unwrap()];
        assert!(check_general_position(&fs, 2).is_err());
    }

    #[test]
    fn slice_dims() {
        let g = vec![form(x(1)), form(x(2))];
        assert_eq!(ideal_slice_dim(&g, 2).unwrap(), 5);
        assert_eq!(ideal_slice_dim(&[], 7).unwrap(), 0);
        assert_eq!(ideal_slice_dim(&[form(x(0))], 1).unwrap(), 1);
    }

    #[test]
    fn cyclic_conics_share_a_point() {
        let c1 = form(&(&x(1) * &x(1)) - &(&x(0) * &x(2)));
        let c2 = form(&(&x(2) * &x(2)) - &(&x(0) * &x(1)));
        let c3 = form(&(&x(0) * &x(0)) - &(&x(1) * &x(2)));
        let r = check_general_position(&[c1.clone(), c2.clone(), c3.clone()], 2).unwrap();
        assert!(!r.in_general_position);
        // oracle: [1:1:1] is a common zero by substitution
        let one = vec![GaussianRational::one(); 3];
        for c in [&c1, &c2, &c3] {
            assert!(c.poly().eval_exact(&one).is_zero());
        }
    }
}
