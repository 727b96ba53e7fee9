use num::complex::Complex64;

use super::slice::SliceFunction;
use crate::error::{NevError, Result};
use crate::exactalg::{LinePoly, UnivariateRootMultiset};

/// One multiplicative piece of a function restricted to a line `u ↦ uξ`.
#[derive(Clone, Debug)]
pub enum LineFactor {
    Constant(Complex64),
    /// Polynomial in `u` with its certified roots.
    Poly {
        poly: LinePoly,
        roots: UnivariateRootMultiset,
    },
    /// `∏_k (1 − (a u + c) qbase^k)` with `a ≠ 0`.
    Pochhammer {
        a: Complex64,
        c: Complex64,
        qbase: Complex64,
        tol: f64,
    },
    /// Evaluated pointwise; its zeros are only seen through Jensen integrals.
    Opaque {
        func: Box<SliceFunction>,
        xi: Vec<Complex64>,
        entire: bool,
    },
}

/// A point of a divisor on the line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DivisorPoint {
    pub location: Complex64,
    pub multiplicity: u32,
}

/// Zeros and poles with known locations inside some radius.
#[derive(Clone, Debug, Default)]
pub struct KnownDivisor {
    pub zeros: Vec<DivisorPoint>,
    pub poles: Vec<DivisorPoint>,
    /// Largest location uncertainty over all points.
    pub residual: f64,
}

fn horner_log_abs(c: &[Complex64], u: Complex64) -> f64 {
    let d = c.len() - 1;
    if u.norm() <= 1.0 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in c.iter().rev() {
            acc = acc * u + a;
        }
        acc.norm().ln()
    } else {
        // p(u) = u^d · Σ c_{d-j} (1/u)^j
        let w = u.inv();
        let mut acc = Complex64::new(0.0, 0.0);
        for a in c.iter() {
            acc = acc * w + a;
        }
        d as f64 * u.norm().ln() + acc.norm().ln()
    }
}

impl LineFactor {
    pub fn log_abs(&self, u: Complex64) -> f64 {
        match self {
            LineFactor::Constant(c) => c.norm().ln(),
            LineFactor::Poly { poly, .. } => horner_log_abs(&poly.coeffs_u, u),
            LineFactor::Pochhammer { a, c, qbase, tol } => {
                let mut t = a * u + c;
                let qa = qbase.norm();
                let mut s = 0.0;
                let mut k = 0;
                loop {
                    s += (Complex64::new(1.0, 0.0) - t).norm().ln();
                    k += 1;
                    if t.norm() * qa < *tol || k > 100_000 {
                        break;
                    }
                    t *= qbase;
                }
                s
            }
            LineFactor::Opaque { func, xi, .. } => {
                let z: Vec<Complex64> = xi.iter().map(|x| x * u).collect();
                func.log_abs(&z)
            }
        }
    }

    pub fn is_opaque(&self) -> bool {
        matches!(self, LineFactor::Opaque { .. })
    }

    /// Zeros with `|u| ≤ radius`; `None` for opaque factors.
    pub fn zeros_within(&self, radius: f64) -> Option<(Vec<DivisorPoint>, f64)> {
        match self {
            LineFactor::Constant(_) => Some((vec![], 0.0)),
            LineFactor::Poly { roots, .. } => Some((
                roots
                    .roots
                    .iter()
                    .filter(|r| r.location.norm() <= radius + roots.residual)
                    .map(|r| DivisorPoint {
                        location: r.location,
                        multiplicity: r.multiplicity,
                    })
                    .collect(),
                roots.residual,
            )),
            LineFactor::Pochhammer { a, c, qbase, .. } => {
                // a u + c = qbase^{-k}
                let bound = radius * a.norm() + c.norm();
                let qi = qbase.inv();
                let mut p = Complex64::new(1.0, 0.0);
                let mut out = Vec::new();
                let mut res: f64 = 0.0;
                for _ in 0..10_000 {
                    if p.norm() > bound * (1.0 + 1e-12) + 1e-300 {
                        break;
                    }
                    let u = (p - c) / a;
                    if u.norm() <= radius * (1.0 + 1e-12) {
                        out.push(DivisorPoint {
                            location: u,
                            multiplicity: 1,
                        });
                        res = res.max(8.0 * f64::EPSILON * (u.norm() + (c / a).norm()));
                    }
                    p *= qi;
                }
                Some((out, res))
            }
            LineFactor::Opaque { .. } => None,
        }
    }
}

/// A function restricted to a line, as a product of factors with integer exponents.
#[derive(Clone, Debug)]
pub struct LineFunction {
    factors: Vec<(LineFactor, i32)>,
}

impl LineFunction {
    pub fn new(factors: Vec<(LineFactor, i32)>) -> Self {
        LineFunction { factors }
    }

    pub fn factors(&self) -> &[(LineFactor, i32)] {
        &self.factors
    }

    pub fn log_abs(&self, u: Complex64) -> f64 {
        self.factors
            .iter()
            .map(|(f, e)| *e as f64 * f.log_abs(u))
            .sum()
    }

    pub fn has_opaque(&self) -> bool {
        self.factors.iter().any(|(f, _)| f.is_opaque())
    }

    pub fn opaque_factors(&self) -> impl Iterator<Item = (&LineFactor, i32)> {
        self.factors
            .iter()
            .filter(|(f, _)| f.is_opaque())
            .map(|(f, e)| (f, *e))
    }

    /// Zeros and poles of the non-opaque factors inside `radius`.
    ///
    /// Coincident points of opposite sign cancel except at `u = 0`, where the
    /// zero and pole divisors of a function of several variables may both
    /// pass through the origin and each is counted.
    pub fn known_divisor(&self, radius: f64) -> Result<KnownDivisor> {
        let mut signed: Vec<(Complex64, i64)> = Vec::new();
        let mut origin_zero = 0i64;
        let mut origin_pole = 0i64;
        let mut residual: f64 = 0.0;
        for (f, e) in &self.factors {
            let (pts, res) = match f.zeros_within(radius) {
                Some(t) => t,
                None => continue,
            };
            residual = residual.max(res);
            for p in pts {
                let m = p.multiplicity as i64 * *e as i64;
                if p.location.norm() <= res.max(1e-300) {
                    if m > 0 {
                        origin_zero += m;
                    } else {
                        origin_pole -= m;
                    }
                    continue;
                }
                let tol = 1e-9 * p.location.norm().max(1.0);
                match signed
                    .iter_mut()
                    .find(|(l, _)| (l - p.location).norm() <= tol)
                {
                    Some((_, acc)) => *acc += m,
                    None => signed.push((p.location, m)),
                }
            }
        }
        let mut d = KnownDivisor {
            residual,
            ..Default::default()
        };
        let origin = Complex64::new(0.0, 0.0);
        if origin_zero > 0 {
            d.zeros.push(DivisorPoint {
                location: origin,
                multiplicity: origin_zero as u32,
            });
        }
        if origin_pole > 0 {
            d.poles.push(DivisorPoint {
                location: origin,
                multiplicity: origin_pole as u32,
            });
        }
        for (l, m) in signed {
            if m > 0 {
                d.zeros.push(DivisorPoint {
                    location: l,
                    multiplicity: m as u32,
                });
            } else if m < 0 {
                d.poles.push(DivisorPoint {
                    location: l,
                    multiplicity: (-m) as u32,
                });
            }
        }
        Ok(d)
    }

    /// Fail unless all opaque factors are entire.
    pub fn require_countable(&self) -> Result<()> {
        for (f, _) in &self.factors {
            if let LineFactor::Opaque { entire: false, .. } = f {
                return Err(NevError::Unsupported(
                    "zero counting for a non-entire opaque factor".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Exact trapezoid error of `log|u − a|` on `|u| = r` with `n` nodes at
/// angles `2π(j+δ)/n`, in absolute value.
pub fn root_trapezoid_error(a: Complex64, r: f64, n: usize, delta: f64) -> f64 {
    let phase = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * delta);
    let val = if a.norm() <= r {
        let t = (a / r).powi(n as i32) * phase;
        (Complex64::new(1.0, 0.0) - t).norm().ln()
    } else {
        let t = (r / a).powi(n as i32) * phase.conj();
        (Complex64::new(1.0, 0.0) - t).norm().ln()
    };
    (val / n as f64).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{GaussianRational, Line, Polynomial, RationalFunction};
    use crate::funcspace::QPochhammerSpec;

    #[test]
    fn trapezoid_error_formula_matches_direct_sum() {
        let a = Complex64::new(1.3, 0.4);
        let n = 16;
        let delta = 0.381966;
        for r in [0.7, 2.0] {
            let mean: f64 = (0..n)
                .map(|j| {
                    let th = 2.0 * std::f64::consts::PI * (j as f64 + delta) / n as f64;
                    (Complex64::from_polar(r, th) - a).norm().ln()
                })
                .sum::<f64>()
                / n as f64;
            let exact = r.max(a.norm()).ln();
            let e = root_trapezoid_error(a, r, n, delta);
            assert!(((mean - exact).abs() - e).abs() < 1e-14);
        }
    }

    #[test]
    fn pochhammer_line_zeros_solve_the_closed_form() {
        let p = QPochhammerSpec::on_variable(2, 0, 0.5).unwrap();
        let f = SliceFunction::from(p);
        let line = Line::exact(vec![
            GaussianRational::from_int(1),
            GaussianRational::from_int(2),
        ])
        .unwrap();
        let lf = f.restrict(&line).unwrap();
        let d = lf.known_divisor(100.0).unwrap();
        // ξ₁ = 1/√5, so zeros at u = 2^k √5 for 2^k √5 ≤ 100
        assert_eq!(d.zeros.len(), 6);
        for (k, z) in d.zeros.iter().enumerate() {
            let want = (1u32 << k) as f64 * 5f64.sqrt();
            assert!((z.location.re - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn origin_points_do_not_cancel() {
        let h = RationalFunction::new(Polynomial::var(2, 0), Polynomial::var(2, 1)).unwrap();
        let line = Line::exact(vec![
            GaussianRational::from_int(1),
            GaussianRational::from_int(3),
        ])
        .unwrap();
        let lf = SliceFunction::from(h).restrict(&line).unwrap();
        let d = lf.known_divisor(10.0).unwrap();
        assert_eq!(d.zeros.len(), 1);
        assert_eq!(d.poles.len(), 1);
    }
}
