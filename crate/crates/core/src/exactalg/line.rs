use num::complex::Complex64;
use num::rational::BigRational;
use num::Zero;

use super::gaussian::{rat_to_f64, GaussianRational};
use super::poly::Polynomial;
use super::roots::{roots_exact, roots_f64, UnivariateRootMultiset};
use super::uni::UniPoly;
use crate::error::{usage, Result};

/// A complex line `u ↦ u·ξ` through the origin of `ℂ^m`.
///
/// An exact line stores a Gaussian rational vector `v` with `ξ = v/‖v‖`; its
/// restrictions are computed exactly in the parameter `w = u/‖v‖`, and only
/// the final rescaling by powers of `‖v‖` is rounded.
#[derive(Clone, Debug)]
pub struct Line {
    exact: Option<(Vec<GaussianRational>, BigRational)>,
    xi: Vec<Complex64>,
    norm: f64,
}

impl Line {
    pub fn exact(v: Vec<GaussianRational>) -> Result<Line> {
        let norm_sq = v
            .iter()
            .fold(BigRational::zero(), |acc, c| acc + c.norm_sqr());
        if norm_sq.is_zero() {
            return usage("zero direction vector");
        }
        let norm = rat_to_f64(&norm_sq).sqrt();
        let xi = v.iter().map(|c| c.to_c64() / norm).collect();
        Ok(Line {
            exact: Some((v, norm_sq)),
            xi,
            norm,
        })
    }

    /// A floating unit direction. Its norm must be 1 within `1e-12`.
    pub fn unit(xi: Vec<Complex64>) -> Result<Line> {
        let n: f64 = xi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 {
            return usage("zero direction vector");
        }
        if (n - 1.0).abs() > 1e-12 {
            return usage(format!("direction has norm {n}, expected 1"));
        }
        Ok(Line {
            exact: None,
            xi,
            norm: 1.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    pub fn xi(&self) -> &[Complex64] {
        &self.xi
    }

    pub fn exact_vector(&self) -> Option<&[GaussianRational]> {
        self.exact.as_ref().map(|(v, _)| v.as_slice())
    }

    /// `‖v‖` for exact lines, 1 otherwise.
    pub fn scale(&self) -> f64 {
        self.norm
    }

    pub fn point(&self, u: Complex64) -> Vec<Complex64> {
        self.xi.iter().map(|x| x * u).collect()
    }
}

/// A polynomial restricted to a line, as a polynomial in `u`.
#[derive(Clone, Debug)]
pub struct LinePoly {
    /// Exact coefficients in `w = u/‖v‖` when the line is exact.
    pub exact_w: Option<UniPoly>,
    /// Coefficients in `u`, lowest degree first.
    pub coeffs_u: Vec<Complex64>,
    /// Absolute bound on the rounding error of each `u` coefficient.
    pub err: f64,
    scale: f64,
}

impl LinePoly {
    pub fn is_zero(&self) -> bool {
        match &self.exact_w {
            Some(p) => p.is_zero(),
            None => self.coeffs_u.iter().all(|c| c.norm() == 0.0),
        }
    }

    pub fn degree(&self) -> Option<usize> {
        match &self.exact_w {
            Some(p) => p.degree(),
            None => self.coeffs_u.iter().rposition(|c| c.norm() != 0.0),
        }
    }

    /// Roots in the `u` parameter.
    pub fn roots(&self, tol: f64) -> Result<UnivariateRootMultiset> {
        match &self.exact_w {
            Some(p) => Ok(roots_exact(p, tol)?.scaled(self.scale)),
            None => roots_f64(&self.coeffs_u, tol),
        }
    }

    pub fn eval(&self, u: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs_u.iter().rev() {
            acc = acc * u + c;
        }
        acc
    }
}

/// Substitute `z = u·ξ` into `p`.
pub fn restrict_to_line(p: &Polynomial, line: &Line) -> Result<LinePoly> {
    if p.nvars() != line.dim() {
        return usage(format!(
            "polynomial in {} variables restricted to a line in C^{}",
            p.nvars(),
            line.dim()
        ));
    }
    let deg = p.total_degree().unwrap_or(0) as usize;
    match &line.exact {
        Some((v, _)) => {
            let mut pows: Vec<Vec<GaussianRational>> = v
                .iter()
                .map(|c| vec![GaussianRational::one(), c.clone()])
                .collect();
            let mut w = vec![GaussianRational::zero(); deg + 1];
            for (e, c) in p.terms() {
                let mut t = c.clone();
                for (i, &k) in e.0.iter().enumerate() {
                    let k = k as usize;
                    while pows[i].len() <= k {
                        let next = &pows[i][pows[i].len() - 1] * &v[i];
                        pows[i].push(next);
                    }
                    if k > 0 {
                        t *= &pows[i][k];
                    }
                }
                w[e.degree() as usize] += &t;
            }
            let w = UniPoly::new(w);
            let mut coeffs_u = Vec::with_capacity(deg + 1);
            let mut err: f64 = 0.0;
            for (k, c) in w.coeffs().iter().enumerate() {
                let val = c.to_c64() / line.norm.powi(k as i32);
                err = err.max(4.0 * (k as f64 + 2.0) * f64::EPSILON * val.norm());
                coeffs_u.push(val);
            }
            Ok(LinePoly {
                exact_w: Some(w),
                coeffs_u,
                err,
                scale: line.norm,
            })
        }
        None => {
            let mut coeffs_u = vec![Complex64::new(0.0, 0.0); deg + 1];
            let mut absum = vec![0.0f64; deg + 1];
            for (e, c) in p.terms() {
                let mut t = c.to_c64();
                for (x, &k) in line.xi.iter().zip(&e.0) {
                    if k > 0 {
                        t *= x.powu(k);
                    }
                }
                let k = e.degree() as usize;
                coeffs_u[k] += t;
                absum[k] += t.norm();
            }
            let nterms = p.num_terms().max(1) as f64;
            let err = absum
                .iter()
                .map(|a| 4.0 * (nterms + deg as f64) * f64::EPSILON * a)
                .fold(0.0, f64::max);
            while coeffs_u.last().is_some_and(|c| c.norm() == 0.0) && coeffs_u.len() > 1 {
                coeffs_u.pop();
            }
            Ok(LinePoly {
                exact_w: None,
                coeffs_u,
                err,
                scale: 1.0,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(v: i64) -> GaussianRational {
        GaussianRational::from_int(v)
    }

    #[test]
    fn product_on_diagonal() {
        let p = &Polynomial::var(2, 0) * &Polynomial::var(2, 1);
        let l = Line::exact(vec![g(1), g(1)]).unwrap();
        let r = restrict_to_line(&p, &l).unwrap();
        assert_eq!(r.exact_w.as_ref().unwrap(), &UniPoly::from_ints(&[0, 0, 1]));
        assert!((r.coeffs_u[2] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn vanishes_on_orthogonal_axis() {
        let l = Line::exact(vec![g(0), g(1)]).unwrap();
        assert!(restrict_to_line(&Polynomial::var(2, 0), &l)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn zero_direction_rejected() {
        assert!(Line::exact(vec![g(0), g(0)]).is_err());
        assert!(Line::unit(vec![Complex64::new(0.0, 0.0)]).is_err());
        assert!(Line::unit(vec![Complex64::new(2.0, 0.0)]).is_err());
    }

    #[test]
    fn float_direction_matches_exact() {
        let p = &(&Polynomial::var(2, 0) * &Polynomial::var(2, 0)) + &Polynomial::var(2, 1);
        let le = Line::exact(vec![g(3), g(4)]).unwrap();
        let lf = Line::unit(vec![Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)]).unwrap();
        let a = restrict_to_line(&p, &le).unwrap();
        let b = restrict_to_line(&p, &lf).unwrap();
        for k in 0..3 {
            assert!((a.coeffs_u[k] - b.coeffs_u[k]).norm() <= 1e-15 + b.err);
        }
        // a^2 u^2 + b u with (a,b) = (0.6, 0.8)
        assert!((b.coeffs_u[2].re - 0.36).abs() < 1e-15);
        assert!((b.coeffs_u[1].re - 0.8).abs() < 1e-15);
    }
}
