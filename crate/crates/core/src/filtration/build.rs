use rayon::prelude::*;
use serde::Serialize;

use super::hilbert::{hilbert_stabilization, HilbertReport};
use crate::error::{usage, NevError, Result};
use crate::exactalg::{MultiIndex, Polynomial};
use crate::funcspace::{binom, dim_v, HomogeneousForm, MonomialSpace};
use crate::linalg::SparseEchelon;

/// Default cap on `dim V_α`.
pub const COLUMN_CAP: usize = 512;

/// `n`-tuples with `d·σ(i) ≤ α` in increasing lex order.
pub fn enumerate_tuples(n: usize, alpha: u32, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, budget: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for k in 0..=budget {
            cur.push(k);
            rec(n, budget - k, cur, out);
            cur.pop();
        }
    }
    assert!(d >= 1, "degree must be positive");
    let mut out = Vec::new();
    rec(n, alpha / d, &mut Vec::new(), &mut out);
    out
}

/// Lift forms of mixed degrees to the common degree `lcm(d_j)` by powers.
pub fn lift_to_common_degree(forms: &[HomogeneousForm]) -> (Vec<HomogeneousForm>, u32) {
    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let d = forms
        .iter()
        .map(|f| f.degree())
        .fold(1, |l, x| l / gcd(l, x) * x);
    (forms.iter().map(|f| f.pow(d / f.degree())).collect(), d)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiltrationLevel {
    pub tuple: Vec<u32>,
    /// `dim W_(i)`.
    pub dim: usize,
    /// `Δ_(i) = dim W_(i) / W_(i')` with `(i')` the next tuple.
    pub quotient: usize,
}

/// A basis element `ψ = γ^(i) ρ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasisElement {
    pub tuple: Vec<u32>,
    pub rho: Vec<u32>,
    #[serde(skip)]
    pub psi: Polynomial,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Filtration {
    pub n: usize,
    pub d: u32,
    pub alpha: u32,
    pub levels: Vec<FiltrationLevel>,
    /// Basis of `V_α` adapted to the filtration, last level first.
    pub basis: Vec<BasisElement>,
    pub hilbert: HilbertReport,
    #[serde(skip)]
    gammas: Vec<HomogeneousForm>,
}

fn gamma_power(gammas: &[HomogeneousForm], tuple: &[u32]) -> Polynomial {
    let n1 = gammas[0].nplus1();
    let mut p = Polynomial::one(n1);
    for (g, &k) in gammas.iter().zip(tuple) {
        if k > 0 {
            p = &p * &g.poly().pow(k);
        }
    }
    p
}

fn check_gammas(gammas: &[HomogeneousForm]) -> Result<(usize, u32)> {
    if gammas.is_empty() {
        return usage("no forms");
    }
    let n1 = gammas[0].nplus1();
    let d = gammas[0].degree();
    if gammas.iter().any(|g| g.nplus1() != n1) {
        return usage("forms in different numbers of variables");
    }
    if gammas.iter().any(|g| g.degree() != d) {
        return usage("forms of different degrees; lift them to a common degree first");
    }
    if gammas.len() + 1 != n1 {
        return usage(format!(
            "{} forms in {n1} variables: the filtration needs n forms in n+1 variables",
            gammas.len()
        ));
    }
    Ok((gammas.len(), d))
}

/// Build `W_(i) = Σ_{(e) ≥ (i)} γ^(e) V_{α − dσ(e)}` for every tuple.
///
/// Levels are processed from the last tuple upward, so each `W_(i)` is the
/// span accumulated so far, and the generators that enlarge it form the
/// adapted basis.
pub fn build_filtration(gammas: &[HomogeneousForm], alpha: u32) -> Result<Filtration> {
    let (n, d) = check_gammas(gammas)?;
    if alpha < d {
        return usage(format!("alpha = {alpha} is below the form degree {d}"));
    }
    let cols = dim_v(n + 1, alpha);
    if cols > COLUMN_CAP {
        return Err(NevError::Size(format!(
            "dim V_{alpha} = {cols} exceeds the cap {COLUMN_CAP}; lower alpha"
        )));
    }
    let hilbert = hilbert_stabilization(gammas)?;
    if !hilbert.is_zero_dimensional() {
        return Err(NevError::Hypothesis(
            "the forms must meet in finitely many points of P^n".into(),
        ));
    }
    let space = MonomialSpace::new(n + 1, alpha);
    let tuples = enumerate_tuples(n, alpha, d);
    let mut ech = SparseEchelon::new();
    let mut dims = vec![0usize; tuples.len()];
    let mut basis = Vec::with_capacity(cols);
    for (idx, t) in tuples.iter().enumerate().rev() {
        let s: u32 = t.iter().sum();
        let g = gamma_power(gammas, t);
        // generators γ^(i) ρ for this tuple, then reduce in order
        let gens: Vec<(MultiIndex, Polynomial)> = MultiIndex::all_of_degree(n + 1, alpha - d * s)
            .into_par_iter()
            .map(|rho| {
                let psi = g.shift(&rho);
                (rho, psi)
            })
            .collect();
        for (rho, psi) in gens {
            if ech.rank() == cols {
                break;
            }
            if ech.insert(space.coords(&psi)) {
                basis.push(BasisElement {
                    tuple: t.clone(),
                    rho: rho.0,
                    psi,
                });
            }
        }
        dims[idx] = ech.rank();
    }
    let levels = tuples
        .iter()
        .enumerate()
        .map(|(i, t)| FiltrationLevel {
            tuple: t.clone(),
            dim: dims[i],
            quotient: dims[i] - dims.get(i + 1).copied().unwrap_or(0),
        })
        .collect();
    Ok(Filtration {
        n,
        d,
        alpha,
        levels,
        basis,
        hilbert,
        gammas: gammas.to_vec(),
    })
}

impl Filtration {
    pub fn m(&self) -> usize {
        dim_v(self.n + 1, self.alpha)
    }

    pub fn gammas(&self) -> &[HomogeneousForm] {
        &self.gammas
    }

    /// Re-derive the rank of the basis with a fresh elimination.
    pub fn basis_rank(&self) -> usize {
        let space = MonomialSpace::new(self.n + 1, self.alpha);
        let mut e = SparseEchelon::new();
        for b in &self.basis {
            e.insert(space.coords(&b.psi));
        }
        e.rank()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelCheck {
    pub tuple: Vec<u32>,
    pub quotient: usize,
    /// `d^n` inside the guaranteed region `dσ(i) < α − α₀`.
    pub expected: Option<usize>,
    /// Bound `dim V_{α₀}` outside it.
    pub bound: usize,
}

/// Check `Δ_(i) = d^n` where `dσ(i) < α − α₀` and `Δ_(i) ≤ dim V_{α₀}` elsewhere.
pub fn quotient_check(f: &Filtration, alpha0: u32) -> Result<Vec<LevelCheck>> {
    let dn = (f.d as usize).pow(f.n as u32);
    let bound = dim_v(f.n + 1, alpha0);
    let mut out = Vec::with_capacity(f.levels.len());
    let total: usize = f.levels.iter().map(|l| l.quotient).sum();
    if total != f.m() {
        return Err(NevError::Hypothesis(format!(
            "quotient dimensions sum to {total}, not dim V_alpha = {}",
            f.m()
        )));
    }
    for l in &f.levels {
        let s: u32 = l.tuple.iter().sum();
        let guaranteed = ((f.d * s) as i64) < f.alpha as i64 - alpha0 as i64;
        let expected = guaranteed.then_some(dn);
        if let Some(e) = expected {
            if l.quotient != e {
                return Err(NevError::Hypothesis(format!(
                    "level {:?}: quotient dimension {} differs from d^n = {e}",
                    l.tuple, l.quotient
                )));
            }
        } else if l.quotient > bound {
            return Err(NevError::Hypothesis(format!(
                "level {:?}: quotient dimension {} exceeds dim V_alpha0 = {bound}",
                l.tuple, l.quotient
            )));
        }
        out.push(LevelCheck {
            tuple: l.tuple.clone(),
            quotient: l.quotient,
            expected,
            bound,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ratios {
    /// `Mα/Δ`.
    pub m_alpha_over_delta: f64,
    /// Its limit `d(n+1)`.
    pub m_alpha_over_delta_limit: f64,
    pub inv_delta: f64,
    /// Leading-order `1/Δ ≈ d(n+1)!/α^{n+1}`.
    pub inv_delta_asymptotic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiltrationReport {
    pub alpha: u32,
    pub d: u32,
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    /// First degree from which the Hilbert function is stable.
    pub alpha0: Option<u32>,
    /// The value `nd` used in the proof of the main estimate.
    pub alpha0_nd: u32,
    /// `Δ = Σ_(i) i_j Δ_(i)`, equal for every `j`.
    pub delta: u64,
    pub delta_per_j: Vec<u64>,
    pub levels: Vec<FiltrationLevel>,
    pub ratios: Ratios,
}

/// Totals `Δ` (checked independent of `j`) and `M`, with the ratios.
pub fn delta_totals(f: &Filtration) -> Result<FiltrationReport> {
    let per_j: Vec<u64> = (0..f.n)
        .map(|j| {
            f.levels
                .iter()
                .map(|l| l.tuple[j] as u64 * l.quotient as u64)
                .sum()
        })
        .collect();
    if per_j.windows(2).any(|w| w[0] != w[1]) {
        return Err(NevError::Hypothesis(format!(
            "Delta depends on the index j: {per_j:?}"
        )));
    }
    let delta = per_j[0];
    let m = f.m();
    let n1 = f.n as u64 + 1;
    let fact: f64 = (1..=n1).map(|k| k as f64).product();
    let ratios = Ratios {
        m_alpha_over_delta: m as f64 * f.alpha as f64 / delta as f64,
        m_alpha_over_delta_limit: (f.d as u64 * n1) as f64,
        inv_delta: 1.0 / delta as f64,
        inv_delta_asymptotic: f.d as f64 * fact / (f.alpha as f64).powi(n1 as i32),
    };
    Ok(FiltrationReport {
        alpha: f.alpha,
        d: f.d,
        n: f.n,
        m,
        alpha0: f.hilbert.alpha0,
        alpha0_nd: f.n as u32 * f.d,
        delta,
        delta_per_j: per_j,
        levels: f.levels.clone(),
        ratios,
    })
}

/// `C(α+n, n)`.
pub fn m_alpha(n: usize, alpha: u32) -> u64 {
    binom(alpha as u64 + n as u64, n as u64)
}
