use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use super::linefn::{LineFactor, LineFunction};
use crate::error::{usage, NevError, Result};
use crate::exactalg::{restrict_to_line, Line, Polynomial, RationalFunction, DEFAULT_ROOT_TOL};
use crate::linalg::det_scaled;
use crate::qops::QShift;
use crate::scaled::ScaledComplex;

/// `z ↦ ∏_{k≥0} (1 − ℓ(z)·qbase^k)` for an affine form `ℓ`.
#[derive(Clone, Debug, PartialEq)]
pub struct QPochhammerSpec {
    qbase: Complex64,
    linear: Polynomial,
    tol: f64,
}

pub const DEFAULT_PRODUCT_TOL: f64 = 1e-15;

impl QPochhammerSpec {
    pub fn new(qbase: Complex64, linear: Polynomial, tol: f64) -> Result<Self> {
        let a = qbase.norm();
        if !(a > 0.0 && a < 1.0) {
            return usage(format!(
                "q-Pochhammer base must satisfy 0 < |q| < 1, got |q| = {a}"
            ));
        }
        if linear.total_degree() != Some(1) {
            return usage("q-Pochhammer argument must be an affine form of degree 1");
        }
        if !(tol > 0.0 && tol < 1e-6) {
            return usage(format!(
                "q-Pochhammer truncation tolerance {tol} outside (0, 1e-6)"
            ));
        }
        Ok(QPochhammerSpec { qbase, linear, tol })
    }

    /// `(c·z_var; qbase)_∞` in `nvars` variables.
    pub fn on_variable(nvars: usize, var: usize, qbase: f64) -> Result<Self> {
        QPochhammerSpec::new(
            Complex64::new(qbase, 0.0),
            Polynomial::var(nvars, var),
            DEFAULT_PRODUCT_TOL,
        )
    }

    pub fn qbase(&self) -> Complex64 {
        self.qbase
    }

    pub fn linear(&self) -> &Polynomial {
        &self.linear
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Product evaluated at `x = ℓ(z)`.
    pub fn eval_at_argument(&self, x: Complex64) -> ScaledComplex {
        let mut acc = ScaledComplex::ONE;
        let mut t = x;
        let qa = self.qbase.norm();
        let mut k = 0;
        loop {
            acc = acc.mul_c64(Complex64::new(1.0, 0.0) - t);
            k += 1;
            if t.norm() * qa < self.tol || k > 100_000 {
                break;
            }
            t *= self.qbase;
        }
        acc
    }

    pub fn log_abs_at_argument(&self, x: Complex64) -> f64 {
        let mut s = 0.0;
        let mut t = x;
        let qa = self.qbase.norm();
        let mut k = 0;
        loop {
            s += (Complex64::new(1.0, 0.0) - t).norm().ln();
            k += 1;
            if t.norm() * qa < self.tol || k > 100_000 {
                break;
            }
            t *= self.qbase;
        }
        s
    }
}

/// A meromorphic function on `ℂ^m` that can be restricted to complex lines.
#[derive(Clone, Debug, PartialEq)]
pub enum SliceFunction {
    Rational(RationalFunction),
    Pochhammer(QPochhammerSpec),
    Quotient(Box<SliceFunction>, Box<SliceFunction>),
    Product(Vec<SliceFunction>),
    Power(Box<SliceFunction>, i32),
    Sum(Vec<SliceFunction>),
    /// `det[f_j(q^i z)]` over the listed columns.
    Casorati(Vec<SliceFunction>, QShift),
}

impl From<Polynomial> for SliceFunction {
    fn from(p: Polynomial) -> Self {
        SliceFunction::Rational(RationalFunction::from_poly(p))
    }
}

impl From<RationalFunction> for SliceFunction {
    fn from(r: RationalFunction) -> Self {
        SliceFunction::Rational(r)
    }
}

impl From<QPochhammerSpec> for SliceFunction {
    fn from(p: QPochhammerSpec) -> Self {
        SliceFunction::Pochhammer(p)
    }
}

impl SliceFunction {
    pub fn constant(nvars: usize, c: i64) -> SliceFunction {
        Polynomial::constant(nvars, crate::exactalg::GaussianRational::from_int(c)).into()
    }

    pub fn nvars(&self) -> usize {
        match self {
            SliceFunction::Rational(r) => r.nvars(),
            SliceFunction::Pochhammer(p) => p.linear.nvars(),
            SliceFunction::Quotient(a, _) => a.nvars(),
            SliceFunction::Product(v) | SliceFunction::Sum(v) => v[0].nvars(),
            SliceFunction::Power(a, _) => a.nvars(),
            SliceFunction::Casorati(_, q) => q.nvars(),
        }
    }

    pub fn as_rational(&self) -> Option<&RationalFunction> {
        match self {
            SliceFunction::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        match self {
            SliceFunction::Rational(r) if r.is_polynomial() => {
                let c = r.den().as_constant().unwrap();
                c.is_one().then(|| r.num())
            }
            _ => None,
        }
    }

    /// True only when the function is exactly zero as a rational function.
    pub fn is_exact_zero(&self) -> bool {
        matches!(self, SliceFunction::Rational(r) if r.is_zero())
    }

    pub fn is_entire(&self) -> bool {
        match self {
            SliceFunction::Rational(r) => r.is_polynomial(),
            SliceFunction::Pochhammer(_) => true,
            SliceFunction::Quotient(a, b) => {
                a.is_entire() && b.as_rational().and_then(|r| r.as_constant()).is_some()
            }
            SliceFunction::Product(v) | SliceFunction::Sum(v) => v.iter().all(|f| f.is_entire()),
            SliceFunction::Power(a, k) => *k >= 0 && a.is_entire(),
            SliceFunction::Casorati(v, _) => v.iter().all(|f| f.is_entire()),
        }
    }

    fn check_nvars(parts: &[&SliceFunction]) -> Result<usize> {
        let n = parts[0].nvars();
        if parts.iter().any(|p| p.nvars() != n) {
            return usage("slice functions in different numbers of variables");
        }
        Ok(n)
    }

    pub fn quotient(a: SliceFunction, b: SliceFunction) -> Result<SliceFunction> {
        Self::check_nvars(&[&a, &b])?;
        if b.is_exact_zero() {
            return usage("quotient by an identically zero function");
        }
        if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
            return Ok(x.div(y)?.into());
        }
        Ok(SliceFunction::Quotient(Box::new(a), Box::new(b)))
    }

    pub fn product(parts: Vec<SliceFunction>) -> Result<SliceFunction> {
        if parts.is_empty() {
            return usage("empty product needs an explicit variable count");
        }
        let refs: Vec<&SliceFunction> = parts.iter().collect();
        let n = Self::check_nvars(&refs)?;
        let mut exact = RationalFunction::constant(n, crate::exactalg::GaussianRational::one());
        let mut rest = Vec::new();
        for p in parts {
            match p {
                SliceFunction::Rational(r) => exact = exact.mul(&r)?,
                SliceFunction::Product(v) => rest.extend(v),
                other => rest.push(other),
            }
        }
        if rest.is_empty() {
            return Ok(exact.into());
        }
        if exact.is_zero() {
            return Ok(exact.into());
        }
        if exact.as_constant().map(|c| c.is_one()) != Some(true) {
            rest.insert(0, exact.into());
        }
        if rest.len() == 1 {
            return Ok(rest.pop().unwrap());
        }
        Ok(SliceFunction::Product(rest))
    }

    pub fn power(a: SliceFunction, k: i32) -> Result<SliceFunction> {
        match (&a, k) {
            (_, 1) => Ok(a),
            (SliceFunction::Rational(r), _) => Ok(r.pow(k)?.into()),
            (_, 0) => Ok(SliceFunction::constant(a.nvars(), 1)),
            _ => Ok(SliceFunction::Power(Box::new(a), k)),
        }
    }

    pub fn sum(parts: Vec<SliceFunction>) -> Result<SliceFunction> {
        if parts.is_empty() {
            return usage("empty sum needs an explicit variable count");
        }
        let refs: Vec<&SliceFunction> = parts.iter().collect();
        let n = Self::check_nvars(&refs)?;
        let mut exact = RationalFunction::constant(n, crate::exactalg::GaussianRational::zero());
        let mut rest = Vec::new();
        for p in parts {
            match p {
                SliceFunction::Rational(r) => exact = exact.add(&r)?,
                SliceFunction::Sum(v) => rest.extend(v),
                other => rest.push(other),
            }
        }
        if rest.is_empty() {
            return Ok(exact.into());
        }
        if !exact.is_zero() {
            rest.push(exact.into());
        }
        if rest.len() == 1 {
            return Ok(rest.pop().unwrap());
        }
        Ok(SliceFunction::Sum(rest))
    }

    /// `h(q^k z)`.
    pub fn qscale(&self, q: &QShift, k: i64) -> SliceFunction {
        if k == 0 {
            return self.clone();
        }
        assert_eq!(q.nvars(), self.nvars(), "shift dimension");
        let qk = q.power(k);
        self.scale_vars(&qk)
    }

    fn scale_vars(&self, qk: &[crate::exactalg::GaussianRational]) -> SliceFunction {
        match self {
            SliceFunction::Rational(r) => SliceFunction::Rational(r.scale_vars(qk)),
            SliceFunction::Pochhammer(p) => SliceFunction::Pochhammer(QPochhammerSpec {
                qbase: p.qbase,
                linear: p.linear.scale_vars(qk),
                tol: p.tol,
            }),
            SliceFunction::Quotient(a, b) => {
                SliceFunction::Quotient(Box::new(a.scale_vars(qk)), Box::new(b.scale_vars(qk)))
            }
            SliceFunction::Product(v) => {
                SliceFunction::Product(v.iter().map(|f| f.scale_vars(qk)).collect())
            }
            SliceFunction::Sum(v) => {
                SliceFunction::Sum(v.iter().map(|f| f.scale_vars(qk)).collect())
            }
            SliceFunction::Power(a, e) => SliceFunction::Power(Box::new(a.scale_vars(qk)), *e),
            SliceFunction::Casorati(cols, q2) => {
                SliceFunction::Casorati(cols.iter().map(|f| f.scale_vars(qk)).collect(), q2.clone())
            }
        }
    }

    /// Overflow-safe value at a point.
    pub fn eval_scaled(&self, z: &[Complex64]) -> ScaledComplex {
        match self {
            SliceFunction::Rational(r) => ScaledComplex::from_c64(r.num().eval_c64(z))
                .div(ScaledComplex::from_c64(r.den().eval_c64(z))),
            SliceFunction::Pochhammer(p) => p.eval_at_argument(p.linear.eval_c64(z)),
            SliceFunction::Quotient(a, b) => a.eval_scaled(z).div(b.eval_scaled(z)),
            SliceFunction::Product(v) => v
                .iter()
                .fold(ScaledComplex::ONE, |acc, f| acc.mul(f.eval_scaled(z))),
            SliceFunction::Sum(v) => v
                .iter()
                .fold(ScaledComplex::ZERO, |acc, f| acc.add(f.eval_scaled(z))),
            SliceFunction::Power(a, k) => a.eval_scaled(z).powi(*k),
            SliceFunction::Casorati(cols, q) => {
                let n = cols.len();
                let m: Vec<Vec<ScaledComplex>> = (0..n)
                    .map(|i| {
                        let zi = q.apply_c64(z, i as i32);
                        cols.iter().map(|f| f.eval_scaled(&zi)).collect()
                    })
                    .collect();
                det_scaled(&m)
            }
        }
    }

    pub fn eval_c64(&self, z: &[Complex64]) -> Complex64 {
        self.eval_scaled(z).to_c64()
    }

    /// `log|h(z)|`.
    pub fn log_abs(&self, z: &[Complex64]) -> f64 {
        match self {
            SliceFunction::Pochhammer(p) => p.log_abs_at_argument(p.linear.eval_c64(z)),
            _ => self.eval_scaled(z).ln_abs(),
        }
    }

    /// Restrict to a line. Fails with [`NevError::DegenerateLine`] when some
    /// factor vanishes identically (or has a pole everywhere) on the line.
    pub fn restrict(&self, line: &Line) -> Result<LineFunction> {
        if line.dim() != self.nvars() {
            return usage(format!(
                "function in {} variables restricted to a line in C^{}",
                self.nvars(),
                line.dim()
            ));
        }
        let mut factors = Vec::new();
        self.collect_factors(line, 1, &mut factors)?;
        Ok(LineFunction::new(factors))
    }

    fn collect_factors(&self, line: &Line, e: i32, out: &mut Vec<(LineFactor, i32)>) -> Result<()> {
        match self {
            SliceFunction::Rational(r) => {
                for (p, sign) in [(r.num(), 1), (r.den(), -1)] {
                    if let Some(c) = p.as_constant() {
                        if c.is_zero() {
                            return Err(NevError::DegenerateLine(
                                "function is identically zero".into(),
                            ));
                        }
                        out.push((LineFactor::Constant(c.to_c64()), e * sign));
                        continue;
                    }
                    let lp = restrict_to_line(p, line)?;
                    if lp.is_zero() {
                        return Err(NevError::DegenerateLine(
                            "polynomial factor vanishes on the line".into(),
                        ));
                    }
                    let roots = lp.roots(DEFAULT_ROOT_TOL)?;
                    out.push((LineFactor::Poly { poly: lp, roots }, e * sign));
                }
                Ok(())
            }
            SliceFunction::Pochhammer(p) => {
                let lp = restrict_to_line(&p.linear, line)?;
                let c = lp.coeffs_u.first().copied().unwrap_or_default();
                let a = lp.coeffs_u.get(1).copied().unwrap_or_default();
                if lp.degree().unwrap_or(0) == 0 {
                    let v = p.eval_at_argument(c);
                    if v.is_zero() || v.ln_abs() < -600.0 {
                        return Err(NevError::DegenerateLine(
                            "q-Pochhammer factor vanishes on the line".into(),
                        ));
                    }
                    out.push((LineFactor::Constant(v.to_c64()), e));
                } else {
                    out.push((
                        LineFactor::Pochhammer {
                            a,
                            c,
                            qbase: p.qbase,
                            tol: p.tol,
                        },
                        e,
                    ));
                }
                Ok(())
            }
            SliceFunction::Quotient(a, b) => {
                a.collect_factors(line, e, out)?;
                b.collect_factors(line, -e, out)
            }
            SliceFunction::Product(v) => {
                for f in v {
                    f.collect_factors(line, e, out)?;
                }
                Ok(())
            }
            SliceFunction::Power(a, k) => a.collect_factors(line, e * k, out),
            SliceFunction::Sum(_) | SliceFunction::Casorati(_, _) => {
                let f = LineFactor::Opaque {
                    func: Box::new(self.clone()),
                    xi: line.xi().to_vec(),
                    entire: self.is_entire(),
                };
                // probe a few points; an opaque slice that vanishes at all of
                // them is treated as identically zero on the line
                let probes = [0.37, 1.21, 2.9, 5.3];
                let all_zero = probes.iter().all(|&t| {
                    let u = Complex64::from_polar(t, 0.7 * t);
                    let v = f.log_abs(u);
                    v == f64::NEG_INFINITY || v < -700.0
                });
                if all_zero {
                    return Err(NevError::DegenerateLine(
                        "opaque factor vanishes at all probe points".into(),
                    ));
                }
                out.push((f, e));
                Ok(())
            }
        }
    }

    /// Human readable rendering.
    pub fn describe(&self) -> String {
        match self {
            SliceFunction::Rational(r) => r.to_string(),
            SliceFunction::Pochhammer(p) => {
                format!("({}; {})_inf", p.linear, fmt_c64(p.qbase))
            }
            SliceFunction::Quotient(a, b) => format!("[{}]/[{}]", a.describe(), b.describe()),
            SliceFunction::Product(v) => v
                .iter()
                .map(|f| format!("[{}]", f.describe()))
                .collect::<Vec<_>>()
                .join("*"),
            SliceFunction::Sum(v) => v
                .iter()
                .map(|f| format!("[{}]", f.describe()))
                .collect::<Vec<_>>()
                .join(" + "),
            SliceFunction::Power(a, k) => format!("[{}]^{}", a.describe(), k),
            SliceFunction::Casorati(v, _) => format!("Casorati({} columns)", v.len()),
        }
    }
}

fn fmt_c64(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

/// JSON form of a slice function.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SliceFunctionJson {
    Polynomial(Polynomial),
    Rational {
        num: Polynomial,
        den: Polynomial,
    },
    Pochhammer {
        qbase: [f64; 2],
        linear: Polynomial,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    Quotient(Box<SliceFunctionJson>, Box<SliceFunctionJson>),
    Product(Vec<SliceFunctionJson>),
    Power(Box<SliceFunctionJson>, i32),
    Sum(Vec<SliceFunctionJson>),
}

fn default_tol() -> f64 {
    DEFAULT_PRODUCT_TOL
}

impl SliceFunctionJson {
    pub fn build(&self) -> Result<SliceFunction> {
        Ok(match self {
            SliceFunctionJson::Polynomial(p) => p.clone().into(),
            SliceFunctionJson::Rational { num, den } => {
                RationalFunction::new(num.clone(), den.clone())?.into()
            }
            SliceFunctionJson::Pochhammer { qbase, linear, tol } => {
                QPochhammerSpec::new(Complex64::new(qbase[0], qbase[1]), linear.clone(), *tol)?
                    .into()
            }
            SliceFunctionJson::Quotient(a, b) => SliceFunction::quotient(a.build()?, b.build()?)?,
            SliceFunctionJson::Product(v) => {
                SliceFunction::product(v.iter().map(|f| f.build()).collect::<Result<_>>()?)?
            }
            SliceFunctionJson::Power(a, k) => SliceFunction::power(a.build()?, *k)?,
            SliceFunctionJson::Sum(v) => {
                SliceFunction::sum(v.iter().map(|f| f.build()).collect::<Result<_>>()?)?
            }
        })
    }
}

impl<'de> Deserialize<'de> for SliceFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SliceFunctionJson::deserialize(d)?
            .build()
            .map_err(serde::de::Error::custom)
    }
}

/// Serialized as its human-readable description; not round-trippable.
impl Serialize for SliceFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.describe())
    }
}
