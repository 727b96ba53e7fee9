use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::gaussian::{format_rational, GaussianRational, RationalLiteral};
use crate::error::{usage, NevError, Result};

/// Exponent vector of a monomial. The derived ordering is lexicographic.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, o: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    /// True when `self` divides `o` as monomials.
    pub fn divides(&self, o: &MultiIndex) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    pub fn sub(&self, o: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    /// All exponent vectors of `n` variables with total degree `d`, in
    /// descending lex order (`x0^d` first).
    pub fn all_of_degree(n: usize, d: u32) -> Vec<MultiIndex> {
        fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == n {
                prefix.push(d);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in (0..=d).rev() {
                prefix.push(e);
                rec(n, d - e, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if n == 0 {
            if d == 0 {
                out.push(MultiIndex(vec![]));
            }
            return out;
        }
        rec(n, d, &mut Vec::with_capacity(n), &mut out);
        out
    }
}

/// Sparse multivariate polynomial with Gaussian rational coefficients.
///
/// Terms are kept in a `BTreeMap`, so iteration is in ascending lex order of
/// exponents and the last entry is the lex-leading term. Zero coefficients
/// are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<MultiIndex, GaussianRational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, GaussianRational::one())
    }

    pub fn constant(nvars: usize, c: GaussianRational) -> Self {
        Self::monomial(MultiIndex::zeros(nvars), c)
    }

    /// The variable with index `i` (zero based).
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::unit(nvars, i), GaussianRational::one())
    }

    pub fn monomial(exps: MultiIndex, c: GaussianRational) -> Self {
        let nvars = exps.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Polynomial { nvars, terms }
    }

    /// Build from `(exponents, coefficient)` pairs; repeated exponents are summed.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, GaussianRational)>,
    {
        let mut p = Polynomial::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return usage(format!(
                    "exponent vector of length {} in a polynomial of {} variables",
                    e.len(),
                    nvars
                ));
            }
            p.add_term(MultiIndex(e), &c);
        }
        Ok(p)
    }

    /// Univariate polynomial from integer coefficients, lowest degree first.
    pub fn univariate_ints(coeffs: &[i64]) -> Self {
        let mut p = Polynomial::zero(1);
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term(MultiIndex(vec![k as u32]), &GaussianRational::from_int(*c));
        }
        p
    }

    pub(crate) fn add_term(&mut self, e: MultiIndex, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, GaussianRational> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &MultiIndex) -> GaussianRational {
        self.terms
            .get(e)
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value when the polynomial has no variable part.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                (e.degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.degree()).max()
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|e| e.0[v]).max().unwrap_or(0)
    }

    /// `Some(d)` when every term has total degree `d`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.total_degree()?;
        self.terms.keys().all(|e| e.degree() == d).then_some(d)
    }

    pub fn leading(&self) -> Option<(&MultiIndex, &GaussianRational)> {
        self.terms.iter().next_back()
    }

    pub fn involves(&self, v: usize) -> bool {
        self.terms.keys().any(|e| e.0[v] > 0)
    }

    pub(crate) fn check_same(&self, o: &Polynomial) -> Result<()> {
        if self.nvars != o.nvars {
            return usage(format!(
                "variable count mismatch: {} vs {}",
                self.nvars, o.nvars
            ));
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &Polynomial) -> Result<Polynomial> {
        self.check_same(o)?;
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c);
        }
        Ok(r)
    }

    pub fn checked_sub(&self, o: &Polynomial) -> Result<Polynomial> {
        self.check_same(o)?;
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), &-c);
        }
        Ok(r)
    }

    pub fn checked_mul(&self, o: &Polynomial) -> Result<Polynomial> {
        self.check_same(o)?;
        let mut acc: BTreeMap<MultiIndex, GaussianRational> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e = e1.add(e2);
                let c = c1 * c2;
                match acc.get_mut(&e) {
                    Some(v) => *v += &c,
                    None => {
                        acc.insert(e, c);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Polynomial {
            nvars: self.nvars,
            terms: acc,
        })
    }

    pub fn scale(&self, c: &GaussianRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiply by the monomial `x^e`.
    pub fn shift(&self, e: &MultiIndex) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.add(e), v.clone()))
                .collect(),
        }
    }

    /// Divide by the lex-leading coefficient so it becomes 1.
    pub fn monic(&self) -> Polynomial {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    ///
    /// Division by a single polynomial in a term order leaves a zero remainder
    /// exactly when the divisor divides, so the first non-reducible leading
    /// term settles the question.
    pub fn div_exact(&self, d: &Polynomial) -> Result<Option<Polynomial>> {
        self.check_same(d)?;
        let (ld, lc) = match d.leading() {
            Some((e, c)) => (e.clone(), c.clone()),
            None => return Err(NevError::Usage("division by the zero polynomial".into())),
        };
        let lc_inv = lc.inv()?;
        let mut r = self.clone();
        let mut q = Polynomial::zero(self.nvars);
        while let Some((lr, cr)) = r.leading() {
            if !ld.divides(lr) {
                return Ok(None);
            }
            let e = lr.sub(&ld);
            let c = cr * &lc_inv;
            for (de, dc) in &d.terms {
                r.add_term(de.add(&e), &-(dc * &c));
            }
            q.add_term(e, &c);
        }
        Ok(Some(q))
    }

    /// `p(q₁z₁, …, q_m z_m)`.
    pub fn scale_vars(&self, q: &[GaussianRational]) -> Polynomial {
        assert_eq!(q.len(), self.nvars, "scale vector length");
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (qi, &k) in q.iter().zip(&e.0) {
                if k > 0 {
                    v *= &qi.pow(k as i64).expect("nonzero power");
                }
            }
            out.add_term(e.clone(), &v);
        }
        out
    }

    pub fn derivative(&self, v: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e.0[v];
            if k > 0 {
                let mut ne = e.clone();
                ne.0[v] -= 1;
                out.add_term(ne, &(c * &GaussianRational::from_int(k as i64)));
            }
        }
        out
    }

    /// Coefficients with respect to variable `v`: entry `k` multiplies `z_v^k`.
    pub fn coeffs_in(&self, v: usize) -> Vec<Polynomial> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![Polynomial::zero(self.nvars); deg + 1];
        for (e, c) in &self.terms {
            let k = e.0[v] as usize;
            let mut ne = e.clone();
            ne.0[v] = 0;
            out[k].terms.insert(ne, c.clone());
        }
        if self.is_zero() {
            out.clear();
        }
        out
    }

    pub fn eval_c64(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.nvars, "point dimension");
        let mut s = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = c.to_c64();
            for (zi, &k) in z.iter().zip(&e.0) {
                if k > 0 {
                    t *= zi.powu(k);
                }
            }
            s += t;
        }
        s
    }

    pub fn eval_exact(&self, z: &[GaussianRational]) -> GaussianRational {
        assert_eq!(z.len(), self.nvars, "point dimension");
        let mut s = GaussianRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (zi, &k) in z.iter().zip(&e.0) {
                if k > 0 {
                    t *= &zi.pow(k as i64).expect("nonnegative power");
                }
            }
            s += &t;
        }
        s
    }

    /// Substitute polynomials (all in a common ring) for the variables.
    pub fn compose(&self, subs: &[Polynomial]) -> Result<Polynomial> {
        if subs.len() != self.nvars {
            return usage(format!(
                "substituting {} polynomials into {} variables",
                subs.len(),
                self.nvars
            ));
        }
        let target = match subs.first() {
            Some(p) => p.nvars,
            None => 0,
        };
        if subs.iter().any(|p| p.nvars != target) {
            return usage("substituted polynomials live in different rings");
        }
        let mut powers: Vec<Vec<Polynomial>> = subs
            .iter()
            .map(|p| vec![Polynomial::one(target), p.clone()])
            .collect();
        let mut out = Polynomial::zero(target);
        for (e, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = &powers[i][powers[i].len() - 1] * &subs[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][k as usize];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Largest absolute value of a coefficient, as a double.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_c64().norm())
            .fold(0.0, f64::max)
    }

    /// Render with custom variable names.
    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mut mono = Vec::new();
            for (i, &k) in e.0.iter().enumerate() {
                match k {
                    0 => {}
                    1 => mono.push(names[i].clone()),
                    _ => mono.push(format!("{}^{}", names[i], k)),
                }
            }
            let cs = c.to_string();
            let s = if mono.is_empty() {
                cs
            } else if c.is_one() {
                mono.join("*")
            } else if (-c).is_one() {
                format!("-{}", mono.join("*"))
            } else {
                format!("{}*{}", cs, mono.join("*"))
            };
            parts.push(s);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("z{i}")).collect();
        write!(f, "{}", self.fmt_with(&names))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.nvars, self)
    }
}

/// Polynomial arithmetic selector for [`poly_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

pub fn poly_arith(a: &Polynomial, b: &Polynomial, op: PolyOp) -> Result<Polynomial> {
    match op {
        PolyOp::Add => a.checked_add(b),
        PolyOp::Sub => a.checked_sub(b),
        PolyOp::Mul => a.checked_mul(b),
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        self.checked_add(o).expect("polynomial ring mismatch")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        self.checked_sub(o).expect("polynomial ring mismatch")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        self.checked_mul(o).expect("polynomial ring mismatch")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&GaussianRational::from_int(-1))
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exps: Vec<u32>,
    #[serde(default = "zero_literal")]
    re: RationalLiteral,
    #[serde(default = "zero_literal")]
    im: RationalLiteral,
}

fn zero_literal() -> RationalLiteral {
    RationalLiteral::Text("0".into())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolynomialJson {
    nvars: usize,
    terms: Vec<TermJson>,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialJson {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .rev()
                .map(|(e, c)| TermJson {
                    exps: e.0.clone(),
                    re: RationalLiteral::Text(format_rational(&c.re)),
                    im: RationalLiteral::Text(format_rational(&c.im)),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let raw = PolynomialJson::deserialize(d)?;
        let mut terms = Vec::with_capacity(raw.terms.len());
        for (i, t) in raw.terms.into_iter().enumerate() {
            let c = GaussianRational::new(
                t.re.to_rational()
                    .map_err(|e| D::Error::custom(format!("terms[{i}].re: {e}")))?,
                t.im.to_rational()
                    .map_err(|e| D::Error::custom(format!("terms[{i}].im: {e}")))?,
            );
            terms.push((t.exps, c));
        }
        Polynomial::from_terms(raw.nvars, terms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    fn c(n: usize, v: i64) -> Polynomial {
        Polynomial::constant(n, GaussianRational::from_int(v))
    }

    #[test]
    fn sum_cancels() {
        let a = &z(1, 0) + &c(1, 1);
        let b = &z(1, 0) - &c(1, 1);
        assert_eq!(&a + &b, z(1, 0).scale(&GaussianRational::from_int(2)));
    }

    #[test]
    fn product_of_variables() {
        let p = &z(2, 0) * &z(2, 1);
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.coeff(&MultiIndex(vec![1, 1])), GaussianRational::one());
    }

    #[test]
    fn adding_zero_is_identity() {
        let p = &(&z(2, 0) * &z(2, 0)) + &c(2, 3);
        assert_eq!(&p + &Polynomial::zero(2), p);
    }

    #[test]
    fn mismatched_rings_are_rejected() {
        let err = poly_arith(&z(1, 0), &z(2, 0), PolyOp::Add).unwrap_err();
        assert!(matches!(err, NevError::Usage(_)));
    }

    #[test]
    fn exact_division() {
        let a = &(&z(1, 0) * &z(1, 0)) - &c(1, 1);
        let b = &z(1, 0) - &c(1, 1);
        assert_eq!(a.div_exact(&b).unwrap().unwrap(), &z(1, 0) + &c(1, 1));
        assert!(b.div_exact(&a).unwrap().is_none());
        assert!(a.div_exact(&(&z(1, 0) - &c(1, 2))).unwrap().is_none());
    }

    #[test]
    fn json_round_trip() {
        let p = Polynomial::from_terms(
            2,
            vec![
                (vec![2, 0], GaussianRational::ratio(1, 3)),
                (vec![0, 1], GaussianRational::from_ints(0, -2)),
            ],
        )
        .unwrap();
        let js = serde_json::to_string(&p).unwrap();
        let back: Polynomial = serde_json::from_str(&js).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn monomials_in_descending_lex() {
        let ms = MultiIndex::all_of_degree(3, 2);
        assert_eq!(ms.len(), 6);
        assert_eq!(ms[0].0, vec![2, 0, 0]);
        assert_eq!(ms[5].0, vec![0, 0, 2]);
        for w in ms.windows(2) {
            assert!(w[0] > w[1]);
        }
    }

    #[test]
    fn compose_substitutes() {
        // (x0 + x1)^2 at x0 = 1, x1 = z
        let s = &z(2, 0) + &z(2, 1);
        let p = s.pow(2);
        let out = p.compose(&[c(1, 1), z(1, 0)]).unwrap();
        assert_eq!(out, Polynomial::univariate_ints(&[1, 2, 1]));
    }
}
