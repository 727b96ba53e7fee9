use num::complex::Complex64;

use super::gaussian::GaussianRational;
use super::poly::{MultiIndex, Polynomial};
use crate::error::{usage, Result};

/// Dense univariate polynomial over the Gaussian rationals, lowest degree first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniPoly {
    coeffs: Vec<GaussianRational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn constant(c: GaussianRational) -> Self {
        UniPoly::new(vec![c])
    }

    pub fn from_ints(c: &[i64]) -> Self {
        UniPoly::new(c.iter().map(|&v| GaussianRational::from_int(v)).collect())
    }

    /// View a one-variable [`Polynomial`] densely.
    pub fn from_poly(p: &Polynomial) -> Result<Self> {
        if p.nvars() != 1 {
            return usage(format!(
                "expected a univariate polynomial, got {} variables",
                p.nvars()
            ));
        }
        let deg = p.total_degree().unwrap_or(0) as usize;
        let mut c = vec![GaussianRational::zero(); deg + 1];
        for (e, v) in p.terms() {
            c[e.0[0] as usize] = v.clone();
        }
        Ok(UniPoly::new(c))
    }

    pub fn to_poly(&self) -> Polynomial {
        let mut p = Polynomial::zero(1);
        for (k, c) in self.coeffs.iter().enumerate() {
            p.add_term(MultiIndex(vec![k as u32]), c);
        }
        p
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&GaussianRational> {
        self.coeffs.last()
    }

    /// Order of vanishing at 0.
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Drop the factor `u^k` for `k = valuation`.
    pub fn strip_zero_roots(&self) -> (usize, UniPoly) {
        let k = self.valuation();
        (
            k,
            UniPoly::new(self.coeffs[k.min(self.coeffs.len())..].to_vec()),
        )
    }

    pub fn monic(&self) -> UniPoly {
        match self.lead() {
            None => self.clone(),
            Some(l) => {
                let inv = l.inv().expect("nonzero lead");
                UniPoly::new(self.coeffs.iter().map(|c| c * &inv).collect())
            }
        }
    }

    pub fn add(&self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = GaussianRational::zero();
        UniPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = GaussianRational::zero();
        UniPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) - o.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn mul(&self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut c = vec![GaussianRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += &(a * b);
            }
        }
        UniPoly::new(c)
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &GaussianRational::from_int(k as i64))
                .collect(),
        )
    }

    /// Euclidean division over the coefficient field.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = d.lead().unwrap().inv().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut q = vec![GaussianRational::zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            if r[k].is_zero() {
                continue;
            }
            let c = &r[k] * &inv;
            for (j, dc) in d.coeffs.iter().enumerate() {
                let t = dc * &c;
                r[k - dd + j] -= &t;
            }
            q[k - dd] = c;
        }
        r.truncate(dd);
        (UniPoly::new(q), UniPoly::new(r))
    }

    pub fn gcd(&self, o: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn eval_c64(&self, u: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * u + c.to_c64();
        }
        acc
    }

    pub fn to_c64(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| c.to_c64()).collect()
    }

    /// Square-free decomposition: `p = lead · Π s_i^i` with pairwise coprime
    /// monic square-free `s_i`. Returns the nonconstant `(s_i, i)` pairs.
    pub fn squarefree(&self) -> Vec<(UniPoly, u32)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let a = self.monic();
        let b = a.derivative();
        let c = a.gcd(&b);
        let mut w = a.div_rem(&c).0;
        let mut y = b.div_rem(&c).0;
        let mut i = 1;
        while w.degree().unwrap_or(0) > 0 {
            let z = y.sub(&w.derivative());
            let g = w.gcd(&z);
            if g.degree().unwrap_or(0) > 0 {
                out.push((g.clone(), i));
            }
            w = w.div_rem(&g).0;
            y = z.div_rem(&g).0;
            i += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn yun_on_cube_times_linear() {
        // (u-2)^3 (u+1)
        let p = UniPoly::from_ints(&[-2, 1])
            .mul(&UniPoly::from_ints(&[-2, 1]))
            .mul(&UniPoly::from_ints(&[-2, 1]))
            .mul(&UniPoly::from_ints(&[1, 1]));
        let sf = p.squarefree();
        assert_eq!(sf.len(), 2);
        assert_eq!(sf[0], (UniPoly::from_ints(&[1, 1]), 1));
        assert_eq!(sf[1], (UniPoly::from_ints(&[-2, 1]), 3));
    }

    #[test]
    fn division_identity() {
        let a = UniPoly::from_ints(&[5, -3, 0, 2, 7]);
        let d = UniPoly::from_ints(&[1, 0, 3]);
        let (q, r) = a.div_rem(&d);
        assert_eq!(q.mul(&d).add(&r), a);
        assert!(r.degree().unwrap() < 2);
    }
}
