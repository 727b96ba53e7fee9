use num::complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::quad::{circle_mean, QuadratureSpec, RadialGrid, NODE_OFFSET};
use crate::error::{usage, NevError, Result};
use crate::exactalg::Line;
use crate::funcspace::{
    apply_form, root_trapezoid_error, HomogeneousForm, LineFactor, LineFunction, ProjectiveMap,
    SliceFunction,
};

/// Values of `m`, `N` and `T` for one function at one radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NevSample {
    pub r: f64,
    pub m_val: f64,
    pub n_zero: f64,
    pub n_pole: f64,
    pub t_val: f64,
    pub err: f64,
}

/// A per-radius value with its error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub r: f64,
    pub value: f64,
    pub err: f64,
}

/// Per-radius line averages for one slice function.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SliceStats {
    pub radii: Vec<f64>,
    pub n_zero: Vec<f64>,
    pub n_pole: Vec<f64>,
    /// Proximity `m(r, h)`.
    pub prox: Vec<f64>,
    pub prox_err: Vec<f64>,
    /// `∫_{S(r)} log|h| − ∫_{S(1)} log|h|`.
    pub jensen_integral: Vec<f64>,
    /// Uncertainty of the counting functions.
    pub count_err: Vec<f64>,
    /// Bound on the quadrature error of `jensen_integral`.
    pub jensen_err: Vec<f64>,
    /// False when an opaque factor with poles hides part of the divisor.
    pub countable: bool,
}

impl SliceStats {
    pub fn require_countable(&self) -> Result<()> {
        if self.countable {
            Ok(())
        } else {
            Err(NevError::Unsupported(
                "zero counting through a non-entire opaque factor".into(),
            ))
        }
    }
}

/// Means of a function over spheres of each radius and of radius 1.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereMeans {
    pub at_one: f64,
    pub at_one_err: f64,
    pub at: Vec<f64>,
    pub err: Vec<f64>,
}

/// A fixed set of lines on which several functions are all non-degenerate.
///
/// Quantities that are compared with each other are computed on one bundle,
/// so line-sampling noise cancels in their differences.
pub struct LineBundle {
    nvars: usize,
    lines: Vec<Line>,
    restricted: Vec<Vec<LineFunction>>,
    n_theta: usize,
}

fn probe_points() -> [Complex64; 4] {
    [0.37, 1.21, 2.9, 5.3].map(|t| Complex64::from_polar(t, 0.7 * t))
}

impl LineBundle {
    /// Sample lines; a line is rejected when some function is degenerate on
    /// it or when `map` vanishes at every probe point of it.
    pub fn sample(
        nvars: usize,
        quad: &QuadratureSpec,
        funcs: &[&SliceFunction],
        map: Option<&ProjectiveMap>,
    ) -> Result<LineBundle> {
        if let Some(f) = funcs.iter().find(|f| f.nvars() != nvars) {
            return usage(format!(
                "function in {} variables, expected {nvars}",
                f.nvars()
            ));
        }
        if let Some(f) = map {
            if f.nvars() != nvars {
                return usage(format!("map in {} variables, expected {nvars}", f.nvars()));
            }
        }
        for f in funcs {
            if f.is_exact_zero() {
                return usage("function is identically zero");
            }
        }
        let items = quad.prepare_lines(nvars, |line| {
            let r: Vec<LineFunction> = funcs
                .iter()
                .map(|f| f.restrict(line))
                .collect::<Result<_>>()?;
            if let Some(f) = map {
                let dead = probe_points()
                    .iter()
                    .all(|u| f.log_norm(&line.point(*u)) == f64::NEG_INFINITY);
                if dead {
                    return Err(NevError::DegenerateLine("map vanishes on the line".into()));
                }
            }
            Ok((line.clone(), r))
        })?;
        let (lines, restricted) = items.into_iter().unzip();
        Ok(LineBundle {
            nvars,
            lines,
            restricted,
            n_theta: quad.n_theta,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    /// Restriction of function `i` to line `k`.
    pub fn restricted(&self, k: usize, i: usize) -> &LineFunction {
        &self.restricted[k][i]
    }

    fn weight(&self) -> f64 {
        1.0 / self.lines.len() as f64
    }

    /// Line-averaged statistics of function `i`.
    pub fn slice_stats(&self, i: usize, radii: &[f64]) -> Result<SliceStats> {
        let per: Vec<SliceStats> = self
            .restricted
            .par_iter()
            .map(|fs| line_stats(&fs[i], radii, self.n_theta))
            .collect::<Result<_>>()?;
        let w = self.weight();
        let k = radii.len();
        let mut out = SliceStats {
            radii: radii.to_vec(),
            n_zero: vec![0.0; k],
            n_pole: vec![0.0; k],
            prox: vec![0.0; k],
            prox_err: vec![0.0; k],
            jensen_integral: vec![0.0; k],
            count_err: vec![0.0; k],
            jensen_err: vec![0.0; k],
            countable: per.iter().all(|s| s.countable),
        };
        for s in &per {
            for t in 0..k {
                out.n_zero[t] += w * s.n_zero[t];
                out.n_pole[t] += w * s.n_pole[t];
                out.prox[t] += w * s.prox[t];
                out.prox_err[t] += w * s.prox_err[t];
                out.jensen_integral[t] += w * s.jensen_integral[t];
                out.count_err[t] += w * s.count_err[t];
                out.jensen_err[t] += w * s.jensen_err[t];
            }
        }
        Ok(out)
    }

    /// Sphere means of `g` (a function of the point in `ℂ^m`).
    pub fn sphere_means<G>(&self, radii: &[f64], g: G) -> SphereMeans
    where
        G: Fn(&[Complex64]) -> f64 + Sync,
    {
        let per: Vec<(Vec<(f64, f64)>, (f64, f64))> = self
            .lines
            .par_iter()
            .map(|line| {
                let f = |u: Complex64| g(&line.point(u));
                let at: Vec<(f64, f64)> = radii
                    .iter()
                    .map(|&r| circle_mean(f, r, self.n_theta))
                    .collect();
                (at, circle_mean(f, 1.0, self.n_theta))
            })
            .collect();
        let w = self.weight();
        let mut out = SphereMeans {
            at_one: 0.0,
            at_one_err: 0.0,
            at: vec![0.0; radii.len()],
            err: vec![0.0; radii.len()],
        };
        for (at, one) in &per {
            out.at_one += w * one.0;
            out.at_one_err += w * (one.0 - one.1).abs();
            for (t, v) in at.iter().enumerate() {
                out.at[t] += w * v.0;
                out.err[t] += w * (v.0 - v.1).abs();
            }
        }
        out
    }
}

/// Counting function with base radius 1 of a point set.
fn count_points(pts: &[crate::funcspace::DivisorPoint], r: f64, residual: f64) -> (f64, f64) {
    let mut n = 0.0;
    let mut err = 0.0;
    for p in pts {
        let a = p.location.norm();
        if a <= r {
            n += p.multiplicity as f64 * (r / a.max(1.0)).ln();
            err += p.multiplicity as f64 * residual / a.max(1.0).max(residual);
        }
    }
    (n, err)
}

/// Certified trapezoid error of `log|factor|` integrated on `|u| = r`.
fn factor_quadrature_error(f: &LineFactor, r: f64, n: usize) -> f64 {
    match f {
        LineFactor::Constant(_) => 0.0,
        LineFactor::Poly { roots, .. } => roots
            .roots
            .iter()
            .map(|z| z.multiplicity as f64 * root_trapezoid_error(z.location, r, n, NODE_OFFSET))
            .sum(),
        LineFactor::Pochhammer { qbase, tol, .. } => {
            let reach = 64.0 * r.max(1.0);
            let (zs, _) = f.zeros_within(reach).expect("closed-form zeros");
            let near: f64 = zs
                .iter()
                .map(|z| root_trapezoid_error(z.location, r, n, NODE_OFFSET))
                .sum();
            // roots beyond `reach` each contribute below 64^{-n}/n; the
            // truncated tail of the product is below 2·tol/(1 − |q|)
            near + 64f64.powi(-(n as i32)) * 200.0 / n as f64 + 2.0 * tol / (1.0 - qbase.norm())
        }
        LineFactor::Opaque { .. } => 0.0,
    }
}

/// Per-line statistics at the given radii.
fn line_stats(lf: &LineFunction, radii: &[f64], n: usize) -> Result<SliceStats> {
    let rmax = radii.iter().copied().fold(1.0, f64::max);
    let div = lf.known_divisor(rmax)?;
    let opaque: Vec<(&LineFactor, i32)> = lf.opaque_factors().collect();
    let opaque_one: Vec<(f64, f64)> = opaque
        .iter()
        .map(|(f, _)| circle_mean(|u| f.log_abs(u), 1.0, n))
        .collect();
    let (j1, j1h) = circle_mean(|u| lf.log_abs(u), 1.0, n);
    let known_err_one: f64 = lf
        .factors()
        .iter()
        .map(|(f, e)| e.unsigned_abs() as f64 * factor_quadrature_error(f, 1.0, n))
        .sum();
    let k = radii.len();
    let mut s = SliceStats {
        radii: radii.to_vec(),
        n_zero: vec![0.0; k],
        n_pole: vec![0.0; k],
        prox: vec![0.0; k],
        prox_err: vec![0.0; k],
        jensen_integral: vec![0.0; k],
        count_err: vec![0.0; k],
        jensen_err: vec![0.0; k],
        countable: lf.require_countable().is_ok(),
    };
    for (t, &r) in radii.iter().enumerate() {
        let (nz, ez) = count_points(&div.zeros, r, div.residual);
        let (np, ep) = count_points(&div.poles, r, div.residual);
        s.n_zero[t] = nz;
        s.n_pole[t] = np;
        s.count_err[t] = ez + ep;
        for ((f, e), one) in opaque.iter().zip(&opaque_one) {
            let (jr, jrh) = circle_mean(|u| f.log_abs(u), r, n);
            let d = *e as f64 * (jr - one.0);
            let dh = *e as f64 * (jrh - one.1);
            if d >= 0.0 {
                s.n_zero[t] += d;
            } else {
                s.n_pole[t] -= d;
            }
            s.count_err[t] += (d - dh).abs();
        }
        let (jr, jrh, p, ph) = circle_stats(lf, r, n);
        s.jensen_integral[t] = jr - j1;
        s.prox[t] = p;
        s.prox_err[t] = (p - ph).abs();
        let known_err: f64 = lf
            .factors()
            .iter()
            .map(|(f, e)| e.unsigned_abs() as f64 * factor_quadrature_error(f, r, n))
            .sum();
        let opaque_err = if opaque.is_empty() {
            0.0
        } else {
            ((jr - j1) - (jrh - j1h)).abs()
        };
        let rounding = 1e-12 * (1.0 + jr.abs() + j1.abs()) * lf.factors().len().max(1) as f64;
        s.jensen_err[t] = known_err + known_err_one + opaque_err + rounding;
    }
    Ok(s)
}

/// `(J_n, J_{n/2}, P_n, P_{n/2})` for `log|g|` and `log⁺|g|` on `|u| = r`.
fn circle_stats(lf: &LineFunction, r: f64, n: usize) -> (f64, f64, f64, f64) {
    let mut acc = [0.0; 4];
    let vals: Vec<f64> = (0..n)
        .map(|j| {
            let th = 2.0 * std::f64::consts::PI * (j as f64 + NODE_OFFSET) / n as f64;
            let mut v = lf.log_abs(Complex64::from_polar(r, th));
            let mut k = 1;
            while !v.is_finite() && k <= 8 {
                let th2 = th + 1e-7 * k as f64 * 2.0 * std::f64::consts::PI / n as f64;
                v = lf.log_abs(Complex64::from_polar(r, th2));
                k += 1;
            }
            v
        })
        .collect();
    for (j, v) in vals.iter().enumerate() {
        acc[0] += v;
        acc[2] += v.max(0.0);
        if j % 2 == 0 {
            acc[1] += v;
            acc[3] += v.max(0.0);
        }
    }
    let h = (n / 2) as f64;
    (acc[0] / n as f64, acc[1] / h, acc[2] / n as f64, acc[3] / h)
}

fn single_bundle(h: &SliceFunction, quad: &QuadratureSpec) -> Result<LineBundle> {
    LineBundle::sample(h.nvars(), quad, &[h], None)
}

/// `N(r, 1/h)` and `N(r, h)` on the grid.
pub fn counting(
    h: &SliceFunction,
    grid: &RadialGrid,
    quad: &QuadratureSpec,
) -> Result<Vec<NevSample>> {
    nevanlinna(h, grid, quad)
}

/// `m(r, h)` on the grid.
pub fn proximity(
    h: &SliceFunction,
    grid: &RadialGrid,
    quad: &QuadratureSpec,
) -> Result<Vec<Sample>> {
    let b = single_bundle(h, quad)?;
    let s = b.slice_stats(0, grid.radii())?;
    Ok(grid
        .radii()
        .iter()
        .enumerate()
        .map(|(t, &r)| Sample {
            r,
            value: s.prox[t],
            err: s.prox_err[t],
        })
        .collect())
}

/// `m`, `N(r,1/h)`, `N(r,h)` and `T(r,h) = m(r,h) + N(r,h)` on the grid.
pub fn nevanlinna(
    h: &SliceFunction,
    grid: &RadialGrid,
    quad: &QuadratureSpec,
) -> Result<Vec<NevSample>> {
    let b = single_bundle(h, quad)?;
    let s = b.slice_stats(0, grid.radii())?;
    s.require_countable()?;
    Ok(nev_samples(&s))
}

pub(crate) fn nev_samples(s: &SliceStats) -> Vec<NevSample> {
    s.radii
        .iter()
        .enumerate()
        .map(|(t, &r)| NevSample {
            r,
            m_val: s.prox[t],
            n_zero: s.n_zero[t],
            n_pole: s.n_pole[t],
            t_val: s.prox[t] + s.n_pole[t],
            err: s.prox_err[t] + s.count_err[t],
        })
        .collect()
}

/// `T_f(r)` from the Euclidean norm of the components, normalized at `r = 1`.
pub fn characteristic(
    f: &ProjectiveMap,
    grid: &RadialGrid,
    quad: &QuadratureSpec,
) -> Result<Vec<Sample>> {
    let b = LineBundle::sample(f.nvars(), quad, &[], Some(f))?;
    characteristic_on(&b, f, grid.radii())
}

/// [`characteristic`] on a given bundle.
pub fn characteristic_on(b: &LineBundle, f: &ProjectiveMap, radii: &[f64]) -> Result<Vec<Sample>> {
    if let Some(c) = f.components().iter().find(|c| !c.is_entire()) {
        return Err(NevError::Unsupported(format!(
            "characteristic needs entire components, got {}",
            c.describe()
        )));
    }
    if !f.is_reduced() {
        log::warn!("map is not known to be reduced; T_f may include common zeros");
    }
    let s = b.sphere_means(radii, |z| f.log_norm(z));
    Ok(radii
        .iter()
        .enumerate()
        .map(|(t, &r)| Sample {
            r,
            value: s.at[t] - s.at_one,
            err: s.err[t] + s.at_one_err,
        })
        .collect())
}

/// `[N(r,1/h) − N(r,h)] − [∫_{S(r)} log|h| − ∫_{S(1)} log|h|]`.
///
/// Zeros of opaque factors are only known through the same integrals, so
/// their contribution cancels by construction; the residual tests the
/// certified root data of the other factors.
pub fn jensen_residual(
    h: &SliceFunction,
    grid: &RadialGrid,
    quad: &QuadratureSpec,
) -> Result<Vec<Sample>> {
    let b = single_bundle(h, quad)?;
    let s = b.slice_stats(0, grid.radii())?;
    s.require_countable()?;
    Ok(jensen_rows(&s))
}

pub(crate) fn jensen_rows(s: &SliceStats) -> Vec<Sample> {
    s.radii
        .iter()
        .enumerate()
        .map(|(t, &r)| Sample {
            r,
            value: (s.n_zero[t] - s.n_pole[t]) - s.jensen_integral[t],
            err: s.jensen_err[t] + s.count_err[t],
        })
        .collect()
}

/// One row of the first main theorem check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FmtRow {
    pub r: f64,
    pub proximity: f64,
    pub counting: f64,
    pub characteristic: f64,
    pub residual: f64,
    pub err: f64,
}

/// `m_f(r,Q) + N(r, 1/Q(f)) − d·T_f(r)` on the grid.
pub fn fmt_residual(
    f: &ProjectiveMap,
    d: &HomogeneousForm,
    grid: &RadialGrid,
    quad: &QuadratureSpec,
) -> Result<Vec<FmtRow>> {
    let qf = apply_form(d, f)?;
    if qf.is_exact_zero() {
        return Err(NevError::MapInHypersurface(format!(
            "{} vanishes identically on the map",
            d.display()
        )));
    }
    let b = LineBundle::sample(f.nvars(), quad, &[&qf], Some(f)).map_err(|e| match e {
        NevError::DegenerateLine(msg) => NevError::MapInHypersurface(format!(
            "{} vanishes on every sampled line ({msg})",
            d.display()
        )),
        other => other,
    })?;
    let radii = grid.radii();
    let s = b.slice_stats(0, radii)?;
    s.require_countable()?;
    let t = characteristic_on(&b, f, radii)?;
    let deg = d.degree() as f64;
    let qn = d.coeff_norm().ln();
    let m = b.sphere_means(radii, |z| deg * f.log_norm(z) + qn - qf.log_abs(z));
    Ok(radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let residual = m.at[i] + s.n_zero[i] - deg * t[i].value;
            FmtRow {
                r,
                proximity: m.at[i],
                counting: s.n_zero[i],
                characteristic: t[i].value,
                residual,
                err: m.err[i] + s.count_err[i] + deg * t[i].err,
            }
        })
        .collect())
}

/// Weil function `log(‖f(z)‖^d ‖Q‖ / |Q(f(z))|)`; `+∞` when `f(z)` lies on `Q`.
pub fn weil_value(f: &ProjectiveMap, form: &HomogeneousForm, z: &[Complex64]) -> Result<f64> {
    if form.nplus1() != f.components().len() {
        return usage(format!(
            "form in {} variables for a map with {} components",
            form.nplus1(),
            f.components().len()
        ));
    }
    if z.len() != f.nvars() {
        return usage(format!(
            "point in C^{} for a map on C^{}",
            z.len(),
            f.nvars()
        ));
    }
    Ok(weil_at(f, form, z))
}

pub(crate) fn weil_at(f: &ProjectiveMap, form: &HomogeneousForm, z: &[Complex64]) -> f64 {
    let vals: Vec<_> = f.components().iter().map(|c| c.eval_scaled(z)).collect();
    let top = vals
        .iter()
        .filter(|v| !v.is_zero())
        .map(|v| v.ln_abs())
        .fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return f64::NAN;
    }
    // rescale so the largest component has modulus 1
    let x: Vec<Complex64> = vals
        .iter()
        .map(|v| {
            if v.is_zero() {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar((v.ln_abs() - top).exp(), v.arg())
            }
        })
        .collect();
    let norm = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let q = form.eval_c64(&x).norm();
    if q == 0.0 {
        return f64::INFINITY;
    }
    form.degree() as f64 * norm.ln() + form.coeff_norm().ln() - q.ln()
}

/// Least-squares slope of `log⁺T` against `log r` over the top half of the samples.
pub fn order_estimate(radii: &[f64], t: &[f64]) -> Result<f64> {
    if radii.len() != t.len() {
        return usage("radii and T values differ in length");
    }
    if radii.len() < 4 {
        return usage(format!(
            "order estimate needs at least 4 samples, got {}",
            radii.len()
        ));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return usage("radii must be increasing");
    }
    if t.iter().all(|v| *v <= 0.0) {
        return Ok(0.0);
    }
    let start = radii.len() / 2;
    let xs: Vec<f64> = radii[start..].iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = t[start..].iter().map(|v| v.max(1.0).ln()).collect();
    Ok(ls_slope(&xs, &ys).max(0.0))
}

pub(crate) fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Slope of `T` against `log r` by least squares over the whole grid.
pub fn log_slope(samples: &[Sample]) -> f64 {
    let xs: Vec<f64> = samples.iter().map(|s| s.r.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.value).collect();
    ls_slope(&xs, &ys)
}
