//! Exact and scaled-numeric linear algebra shared by the Casorati, filtration
//! and general-position code.

use std::collections::BTreeMap;

use num::complex::Complex64;

use crate::error::{NevError, Result};
use crate::exactalg::{GaussianRational, Polynomial, RationalFunction};
use crate::scaled::ScaledComplex;

/// Sparse vector: column index → nonzero value.
pub type SparseVec = BTreeMap<usize, GaussianRational>;

/// Incremental row echelon form over the Gaussian rationals.
///
/// Each stored row has a pivot entry equal to 1 and no entries left of it.
/// Inserting a vector reduces it against the stored rows and keeps it only if
/// a nonzero remainder survives.
#[derive(Clone, Debug, Default)]
pub struct SparseEchelon {
    rows: BTreeMap<usize, SparseVec>,
}

impl SparseEchelon {
    pub fn new() -> Self {
        SparseEchelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Remainder of `v` modulo the span of the stored rows.
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        let mut cursor = 0usize;
        loop {
            let next = v
                .range(cursor..)
                .find(|(c, _)| self.rows.contains_key(c))
                .map(|(c, x)| (*c, x.clone()));
            let (col, coef) = match next {
                Some(t) => t,
                None => return v,
            };
            let row = &self.rows[&col];
            for (c, x) in row {
                let t = x * &coef;
                match v.get_mut(c) {
                    Some(e) => {
                        *e -= &t;
                        if e.is_zero() {
                            v.remove(c);
                        }
                    }
                    None => {
                        v.insert(*c, -t);
                    }
                }
            }
            cursor = col + 1;
        }
    }

    /// Insert `v`; returns true when it enlarged the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let r = self.reduce(v);
        let (&pivot, lead) = match r.iter().next() {
            Some(t) => t,
            None => return false,
        };
        let inv = lead.inv().expect("nonzero pivot");
        let row: SparseVec = r.into_iter().map(|(c, x)| (c, &x * &inv)).collect();
        self.rows.insert(pivot, row);
        true
    }

    pub fn contains(&self, v: SparseVec) -> bool {
        self.reduce(v).is_empty()
    }
}

/// Rank of a dense exact matrix.
pub fn rank_exact(rows: &[Vec<GaussianRational>]) -> usize {
    let mut e = SparseEchelon::new();
    for r in rows {
        e.insert(dense_to_sparse(r));
    }
    e.rank()
}

pub fn dense_to_sparse(r: &[GaussianRational]) -> SparseVec {
    r.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

/// A nonzero vector `x` with `A x = 0`, if one exists.
pub fn kernel_vector(
    rows: &[Vec<GaussianRational>],
    ncols: usize,
) -> Option<Vec<GaussianRational>> {
    // Gauss-Jordan to reduced row echelon form
    let mut m: Vec<Vec<GaussianRational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let p = (r..m.len()).find(|&i| !m[i][c].is_zero());
        let p = match p {
            Some(p) => p,
            None => continue,
        };
        m.swap(r, p);
        let inv = m[r][c].inv().unwrap();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free = (0..ncols).find(|c| !pivots.contains(c))?;
    let mut x = vec![GaussianRational::zero(); ncols];
    x[free] = GaussianRational::one();
    for (i, &pc) in pivots.iter().enumerate() {
        x[pc] = -&m[i][free];
    }
    Some(x)
}

/// Fraction-free (Bareiss) determinant of a square polynomial matrix.
pub fn det_bareiss(mut m: Vec<Vec<Polynomial>>, nvars: usize) -> Result<Polynomial> {
    let n = m.len();
    if n == 0 {
        return Ok(Polynomial::one(nvars));
    }
    let mut sign = false;
    let mut prev = Polynomial::one(nvars);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = !sign;
                }
                None => return Ok(Polynomial::zero(nvars)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = t.div_exact(&prev)?.ok_or_else(|| {
                    NevError::Numeric("Bareiss step lost exact divisibility".into())
                })?;
            }
            m[i][k] = Polynomial::zero(nvars);
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    Ok(if sign { -&d } else { d })
}

/// Determinant of a rational-function matrix: clear row denominators, run
/// Bareiss on the polynomial matrix, divide back.
pub fn det_rational_bareiss(m: &[Vec<RationalFunction>], nvars: usize) -> Result<RationalFunction> {
    let mut pm = Vec::with_capacity(m.len());
    let mut scale = Polynomial::one(nvars);
    for row in m {
        let mut l = Polynomial::one(nvars);
        for e in row {
            let g = crate::exactalg::poly_gcd(&l, e.den())?;
            l = &l * &e.den().div_exact(&g)?.expect("gcd divides");
        }
        let prow: Vec<Polynomial> = row
            .iter()
            .map(|e| &e.num().clone() * &l.div_exact(e.den()).unwrap().expect("lcm"))
            .collect();
        scale = &scale * &l;
        pm.push(prow);
    }
    let d = det_bareiss(pm, nvars)?;
    RationalFunction::new(d, scale)
}

/// Determinant by cofactor expansion along the first row.
pub fn det_cofactor(m: &[Vec<RationalFunction>], nvars: usize) -> Result<RationalFunction> {
    let n = m.len();
    match n {
        0 => return Ok(RationalFunction::constant(nvars, GaussianRational::one())),
        1 => return Ok(m[0][0].clone()),
        _ => {}
    }
    let mut acc = RationalFunction::constant(nvars, GaussianRational::zero());
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<RationalFunction>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let t = m[0][j].mul(&det_cofactor(&minor, nvars)?)?;
        acc = if j % 2 == 0 {
            acc.add(&t)?
        } else {
            acc.sub(&t)?
        };
    }
    Ok(acc)
}

/// Rank over the field of rational functions by Gaussian elimination.
pub fn rank_rational(m: &[Vec<RationalFunction>]) -> Result<usize> {
    let mut m: Vec<Vec<RationalFunction>> = m.to_vec();
    if m.is_empty() {
        return Ok(0);
    }
    let ncols = m[0].len();
    let mut r = 0;
    for c in 0..ncols {
        let p = match (r..m.len()).find(|&i| !m[i][c].is_zero()) {
            Some(p) => p,
            None => continue,
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].div(&m[r][c])?;
            for j in c..ncols {
                let t = f.mul(&m[r][j])?;
                m[i][j] = m[i][j].sub(&t)?;
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    Ok(r)
}

/// Determinant of a scaled complex matrix by LU with partial pivoting after
/// row normalisation. Never overflows: the result carries its own exponent.
pub fn det_scaled(m: &[Vec<ScaledComplex>]) -> ScaledComplex {
    let n = m.len();
    if n == 0 {
        return ScaledComplex::ONE;
    }
    let mut acc_exp = 0.0;
    let mut a: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for row in m {
        let e = row
            .iter()
            .filter(|x| !x.is_zero())
            .map(|x| x.ln_abs())
            .fold(f64::NEG_INFINITY, f64::max);
        if e == f64::NEG_INFINITY {
            return ScaledComplex::ZERO;
        }
        acc_exp += e;
        a.push(
            row.iter()
                .map(|x| {
                    if x.is_zero() {
                        Complex64::new(0.0, 0.0)
                    } else {
                        x.mant * (x.exp - e).exp()
                    }
                })
                .collect(),
        );
    }
    let mut det = ScaledComplex::from_polar_log(acc_exp, 0.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))
            .unwrap();
        if a[p][k].norm() == 0.0 {
            return ScaledComplex::ZERO;
        }
        if p != k {
            a.swap(p, k);
            det = det.neg();
        }
        let piv = a[k][k];
        det = det.mul_c64(piv);
        for i in k + 1..n {
            let f = a[i][k] / piv;
            if f.norm() == 0.0 {
                continue;
            }
            for j in k + 1..n {
                let t = a[k][j] * f;
                a[i][j] -= t;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(v: i64) -> GaussianRational {
        GaussianRational::from_int(v)
    }

    #[test]
    fn echelon_rank_and_membership() {
        let mut e = SparseEchelon::new();
        assert!(e.insert(dense_to_sparse(&[g(1), g(2), g(0)])));
        assert!(e.insert(dense_to_sparse(&[g(0), g(1), g(1)])));
        assert!(!e.insert(dense_to_sparse(&[g(1), g(3), g(1)])));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(dense_to_sparse(&[g(2), g(5), g(1)])));
        assert!(!e.contains(dense_to_sparse(&[g(0), g(0), g(1)])));
    }

    #[test]
    fn kernel_of_hyperplanes() {
        // x0 = 0, x1 = 0, x0 + x1 = 0 have kernel spanned by (0,0,1)
        let rows = vec![
            vec![g(1), g(0), g(0)],
            vec![g(0), g(1), g(0)],
            vec![g(1), g(1), g(0)],
        ];
        let k = kernel_vector(&rows, 3).unwrap();
        assert_eq!(k, vec![g(0), g(0), g(1)]);
        assert!(kernel_vector(&[vec![g(1), g(0)], vec![g(0), g(1)]], 2).is_none());
    }

    #[test]
    fn bareiss_matches_cofactor() {
        let z = Polynomial::var(1, 0);
        let one = Polynomial::one(1);
        let m = vec![
            vec![one.clone(), z.clone(), &z * &z],
            vec![one.clone(), z.scale(&g(2)), (&z * &z).scale(&g(4))],
            vec![one.clone(), z.scale(&g(3)), (&z * &z).scale(&g(9))],
        ];
        let d1 = det_bareiss(m.clone(), 1).unwrap();
        let rm: Vec<Vec<RationalFunction>> = m
            .iter()
            .map(|r| r.iter().cloned().map(RationalFunction::from_poly).collect())
            .collect();
        let d2 = det_cofactor(&rm, 1).unwrap();
        assert_eq!(&RationalFunction::from_poly(d1.clone()), &d2);
        // (2-1)(3-1)(3-2) z^3
        assert_eq!(d1, z.pow(3).scale(&g(2)));
    }

    #[test]
    fn scaled_det_of_diagonal() {
        let m = vec![
            vec![
                ScaledComplex::from_polar_log(800.0, 0.0),
                ScaledComplex::ZERO,
            ],
            vec![
                ScaledComplex::ZERO,
                ScaledComplex::from_polar_log(-900.0, 0.0),
            ],
        ];
        let d = det_scaled(&m);
        assert!((d.ln_abs() + 100.0).abs() < 1e-12);
    }
}
