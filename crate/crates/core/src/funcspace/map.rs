use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use super::slice::{SliceFunction, SliceFunctionJson};
use crate::error::{usage, Result};
use crate::exactalg::{poly_gcd, poly_gcd_many, GaussianRational, MultiIndex, Polynomial};

/// A map `ℂ^m → ℙ^n` given by `n+1` components.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveMap {
    components: Vec<SliceFunction>,
    reduced: bool,
}

/// Divide polynomial components by their gcd.
pub fn reduce_representation(components: &[Polynomial]) -> Result<ProjectiveMap> {
    if components.is_empty() {
        return usage("a map needs at least one component");
    }
    let n = components[0].nvars();
    if components.iter().any(|p| p.nvars() != n) {
        return usage("components in different numbers of variables");
    }
    let g = poly_gcd_many(components)?;
    let comps = components
        .iter()
        .map(|p| {
            if g.is_constant() {
                Ok(p.clone())
            } else {
                Ok(p.div_exact(&g)?.expect("gcd divides"))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProjectiveMap {
        components: comps.into_iter().map(SliceFunction::from).collect(),
        reduced: true,
    })
}

impl ProjectiveMap {
    /// Build from arbitrary slice functions. Rational components are cleared
    /// of denominators and, when `reduce` is set, divided by their gcd.
    pub fn new(components: Vec<SliceFunction>, reduce: bool) -> Result<ProjectiveMap> {
        if components.len() < 2 {
            return usage("a map to P^n needs at least two components");
        }
        let m = components[0].nvars();
        if components.iter().any(|c| c.nvars() != m) {
            return usage("components in different numbers of variables");
        }
        if components.iter().all(|c| c.is_exact_zero()) {
            return usage("all components are identically zero");
        }
        if components.iter().all(|c| c.as_rational().is_some()) {
            let rats: Vec<_> = components
                .iter()
                .map(|c| c.as_rational().unwrap())
                .collect();
            let mut l = Polynomial::one(m);
            for r in &rats {
                let g = poly_gcd(&l, r.den())?;
                l = &l * &r.den().div_exact(&g)?.expect("gcd divides");
            }
            let polys: Vec<Polynomial> = rats
                .iter()
                .map(|r| {
                    (r.num() * &l)
                        .div_exact(r.den())
                        .unwrap()
                        .expect("denominator divides the lcm")
                })
                .collect();
            if reduce {
                return reduce_representation(&polys);
            }
            return Ok(ProjectiveMap {
                components: polys.into_iter().map(SliceFunction::from).collect(),
                reduced: false,
            });
        }
        // a nonzero constant component rules out common zeros
        let has_unit = components.iter().any(|c| {
            c.as_rational()
                .and_then(|r| r.as_constant())
                .is_some_and(|v| !v.is_zero())
        });
        Ok(ProjectiveMap {
            components,
            reduced: has_unit,
        })
    }

    pub fn from_polys(components: Vec<Polynomial>) -> Result<ProjectiveMap> {
        ProjectiveMap::new(
            components.into_iter().map(SliceFunction::from).collect(),
            true,
        )
    }

    pub fn components(&self) -> &[SliceFunction] {
        &self.components
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// `n` for a map into `ℙ^n`.
    pub fn target_dim(&self) -> usize {
        self.components.len() - 1
    }

    pub fn nvars(&self) -> usize {
        self.components[0].nvars()
    }

    pub fn polynomials(&self) -> Option<Vec<Polynomial>> {
        self.components
            .iter()
            .map(|c| c.as_polynomial().cloned())
            .collect()
    }

    /// `log‖f(z)‖` with the Euclidean norm.
    pub fn log_norm(&self, z: &[Complex64]) -> f64 {
        let logs: Vec<f64> = self.components.iter().map(|c| c.log_abs(z)).collect();
        log_norm_from_logs(&logs)
    }

    pub fn eval_c64(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.components.iter().map(|c| c.eval_c64(z)).collect()
    }
}

/// `½ log Σ exp(2 ℓ_j)` computed without overflow.
pub fn log_norm_from_logs(logs: &[f64]) -> f64 {
    let mx = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return mx;
    }
    let s: f64 = logs.iter().map(|l| (2.0 * (l - mx)).exp()).sum();
    mx + 0.5 * s.ln()
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ComponentJson {
    Poly(Polynomial),
    Slice(SliceFunctionJson),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapJson {
    components: Vec<ComponentJson>,
    #[serde(default = "yes")]
    reduce: bool,
}

fn yes() -> bool {
    true
}

impl<'de> Deserialize<'de> for ProjectiveMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let raw = MapJson::deserialize(d)?;
        let comps = raw
            .components
            .into_iter()
            .enumerate()
            .map(|(i, c)| match c {
                ComponentJson::Poly(p) => Ok(SliceFunction::from(p)),
                ComponentJson::Slice(s) => s
                    .build()
                    .map_err(|e| D::Error::custom(format!("components[{i}]: {e}"))),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        ProjectiveMap::new(comps, raw.reduce).map_err(D::Error::custom)
    }
}

/// A nonzero homogeneous form of degree `d` in `n+1` variables `x_0, …, x_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomogeneousForm {
    poly: Polynomial,
    degree: u32,
}

impl HomogeneousForm {
    pub fn new(poly: Polynomial, degree: u32) -> Result<HomogeneousForm> {
        if poly.is_zero() {
            return usage("form is identically zero");
        }
        if degree == 0 {
            return usage("form degree must be positive");
        }
        if let Some((e, _)) = poly.terms().iter().find(|(e, _)| e.degree() != degree) {
            return usage(format!(
                "term {:?} has degree {} but the form declares degree {}",
                e.0,
                e.degree(),
                degree
            ));
        }
        Ok(HomogeneousForm { poly, degree })
    }

    /// Infer the degree from the polynomial.
    pub fn from_poly(poly: Polynomial) -> Result<HomogeneousForm> {
        let d = poly
            .homogeneous_degree()
            .ok_or_else(|| crate::NevError::Usage("polynomial is not homogeneous".into()))?;
        HomogeneousForm::new(poly, d)
    }

    /// Hyperplane `Σ a_i x_i`.
    pub fn hyperplane(coeffs: &[GaussianRational]) -> Result<HomogeneousForm> {
        let n = coeffs.len();
        let p = Polynomial::from_terms(
            n,
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (MultiIndex::unit(n, i).0, c.clone())),
        )?;
        HomogeneousForm::new(p, 1)
    }

    pub fn hyperplane_ints(coeffs: &[i64]) -> Result<HomogeneousForm> {
        let c: Vec<GaussianRational> = coeffs
            .iter()
            .map(|&v| GaussianRational::from_int(v))
            .collect();
        HomogeneousForm::hyperplane(&c)
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// `n+1`.
    pub fn nplus1(&self) -> usize {
        self.poly.nvars()
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        self.poly
            .terms()
            .values()
            .map(|c| c.to_c64().norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn mul(&self, o: &HomogeneousForm) -> Result<HomogeneousForm> {
        HomogeneousForm::new(self.poly.checked_mul(&o.poly)?, self.degree + o.degree)
    }

    pub fn pow(&self, k: u32) -> HomogeneousForm {
        HomogeneousForm {
            poly: self.poly.pow(k),
            degree: self.degree * k,
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Result<HomogeneousForm> {
        HomogeneousForm::new(self.poly.scale(c), self.degree)
    }

    pub fn eval_c64(&self, x: &[Complex64]) -> Complex64 {
        self.poly.eval_c64(x)
    }

    pub fn display(&self) -> String {
        let names: Vec<String> = (0..self.nplus1()).map(|i| format!("x{i}")).collect();
        self.poly.fmt_with(&names)
    }
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    degree: u32,
    #[serde(flatten)]
    poly: Polynomial,
}

impl Serialize for HomogeneousForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormJson {
            degree: self.degree,
            poly: self.poly.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HomogeneousForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let degree = v
            .get("degree")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| serde::de::Error::custom("form is missing an integer \"degree\""))?;
        let mut pv = v.clone();
        if let Some(o) = pv.as_object_mut() {
            o.remove("degree");
        }
        let poly: Polynomial = serde_json::from_value(pv).map_err(serde::de::Error::custom)?;
        HomogeneousForm::new(poly, degree as u32).map_err(serde::de::Error::custom)
    }
}

/// `D ∘ f = Σ a_I f^I`.
pub fn apply_form(d: &HomogeneousForm, f: &ProjectiveMap) -> Result<SliceFunction> {
    if d.nplus1() != f.components().len() {
        return usage(format!(
            "form in {} variables applied to a map with {} components",
            d.nplus1(),
            f.components().len()
        ));
    }
    if let Some(polys) = f.polynomials() {
        return Ok(d.poly().compose(&polys)?.into());
    }
    let m = f.nvars();
    let mut terms = Vec::new();
    for (e, c) in d.poly().terms() {
        let mut parts = vec![SliceFunction::from(Polynomial::constant(m, c.clone()))];
        for (j, &k) in e.0.iter().enumerate() {
            if k > 0 {
                parts.push(SliceFunction::power(f.components()[j].clone(), k as i32)?);
            }
        }
        terms.push(SliceFunction::product(parts)?);
    }
    SliceFunction::sum(terms)
}
