use num::complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{usage, NevError, Result};
use crate::exactalg::{GaussianRational, Line};

/// Offset of the angular nodes, `θ_j = 2π(j + δ)/n`. An irrational-looking
/// offset keeps nodes away from points with rational arguments.
pub const NODE_OFFSET: f64 = 0.381966;

/// Direction and angular sampling for sphere averages.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    #[serde(default = "QuadratureSpec::default_lines")]
    pub n_lines: usize,
    #[serde(default = "QuadratureSpec::default_theta")]
    pub n_theta: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "QuadratureSpec::default_resample")]
    pub resample_limit: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            n_lines: 64,
            n_theta: 512,
            seed: 0,
            resample_limit: 16,
        }
    }
}

impl QuadratureSpec {
    fn default_lines() -> usize {
        64
    }
    fn default_theta() -> usize {
        512
    }
    fn default_resample() -> usize {
        16
    }

    pub fn new(n_lines: usize, n_theta: usize, seed: u64) -> Result<Self> {
        let q = QuadratureSpec {
            n_lines,
            n_theta,
            seed,
            ..Default::default()
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_lines == 0 {
            return usage("n_lines must be positive");
        }
        if self.n_theta < 4 || !self.n_theta.is_power_of_two() {
            return usage(format!(
                "n_theta must be a power of two and at least 4, got {}",
                self.n_theta
            ));
        }
        Ok(())
    }

    /// Candidate directions: the `n_lines` primary ones followed by
    /// `resample_limit` spares. For `m = 1` there is a single line.
    pub fn candidate_lines(&self, m: usize) -> Result<Vec<Line>> {
        if m == 0 {
            return usage("no variables");
        }
        if m == 1 {
            return Ok(vec![Line::exact(vec![GaussianRational::one()])?]);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(self.n_lines + self.resample_limit);
        while out.len() < self.n_lines + self.resample_limit {
            // a complex Gaussian vector rounded to 1/1024; the rounding keeps
            // the direction exact and barely perturbs its distribution
            let v: Vec<GaussianRational> = (0..m)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    GaussianRational::from_ints(
                        (re * 1024.0).round() as i64,
                        (im * 1024.0).round() as i64,
                    ) * GaussianRational::ratio(1, 1024)
                })
                .collect();
            if v.iter().all(|c| c.is_zero()) {
                continue;
            }
            out.push(Line::exact(v)?);
        }
        Ok(out)
    }

    /// Prepare one item per accepted line, in parallel and in a fixed order.
    ///
    /// `prepare` rejects a line by returning [`NevError::DegenerateLine`];
    /// rejected lines are replaced by spares until `resample_limit` is spent.
    pub fn prepare_lines<T, F>(&self, m: usize, prepare: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&Line) -> Result<T> + Sync,
    {
        self.validate()?;
        let cands = self.candidate_lines(m)?;
        let want = if m == 1 { 1 } else { self.n_lines };
        let results: Vec<Result<T>> = cands.par_iter().map(&prepare).collect();
        let mut out = Vec::with_capacity(want);
        let mut rejected = 0;
        let mut last = String::new();
        for r in results {
            if out.len() == want {
                break;
            }
            match r {
                Ok(t) => out.push(t),
                Err(NevError::DegenerateLine(msg)) => {
                    rejected += 1;
                    log::debug!("resampling a degenerate line: {msg}");
                    last = msg;
                }
                Err(e) => return Err(e),
            }
        }
        if out.len() < want {
            return Err(NevError::DegenerateLine(format!(
                "{rejected} sampled lines were degenerate (last: {last})"
            )));
        }
        Ok(out)
    }
}

/// Radii at which functionals are tabulated, all above the base radius 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialGrid {
    radii: Vec<f64>,
}

impl RadialGrid {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return usage("empty radial grid");
        }
        if let Some(r) = radii.iter().find(|r| !(r.is_finite() && **r > 1.0)) {
            return usage(format!("radius {r} is not a finite number above 1"));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return usage("radii must be strictly increasing");
        }
        Ok(RadialGrid { radii })
    }

    /// `steps` radii from `r0` to `r1`, geometric when `log` is set.
    pub fn spaced(r0: f64, r1: f64, steps: usize, log: bool) -> Result<Self> {
        if steps == 0 {
            return usage("grid needs at least one step");
        }
        if steps == 1 {
            return RadialGrid::new(vec![r0]);
        }
        let radii = (0..steps)
            .map(|i| {
                let t = i as f64 / (steps - 1) as f64;
                if log {
                    (r0.ln() + t * (r1.ln() - r0.ln())).exp()
                } else {
                    r0 + t * (r1 - r0)
                }
            })
            .collect();
        RadialGrid::new(radii)
    }

    /// Parse `"r0:r1:steps:log"` or `"r0:r1:steps:lin"`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return usage(format!("grid {s:?} is not of the form r0:r1:steps:log"));
        }
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| NevError::Usage(format!("bad number {x:?} in grid {s:?}")))
        };
        let steps = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| NevError::Usage(format!("bad step count in grid {s:?}")))?;
        let log = match parts[3].trim() {
            "log" => true,
            "lin" => false,
            other => return usage(format!("grid spacing {other:?} is neither log nor lin")),
        };
        RadialGrid::spaced(num(parts[0])?, num(parts[1])?, steps, log)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

impl<'de> Deserialize<'de> for RadialGrid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Spec(String),
            List(Vec<f64>),
            Obj { radii: Vec<f64> },
        }
        let g = match Raw::deserialize(d)? {
            Raw::Spec(s) => RadialGrid::parse(&s),
            Raw::List(v) | Raw::Obj { radii: v } => RadialGrid::new(v),
        };
        g.map_err(serde::de::Error::custom)
    }
}

/// Trapezoid means of `g(r e^{iθ})` on `n` and on `n/2` nodes.
///
/// A non-finite value at a node (a pole or zero sitting on it) is replaced by
/// the value at a slightly rotated node.
pub fn circle_mean<F: Fn(Complex64) -> f64>(g: F, r: f64, n: usize) -> (f64, f64) {
    let mut full = 0.0;
    let mut half = 0.0;
    for j in 0..n {
        let th = 2.0 * std::f64::consts::PI * (j as f64 + NODE_OFFSET) / n as f64;
        let mut v = g(Complex64::from_polar(r, th));
        let mut k = 1;
        while !v.is_finite() && k <= 8 {
            let th2 = th + 1e-7 * k as f64 * 2.0 * std::f64::consts::PI / n as f64;
            log::debug!("non-finite value at node {j} on |u|={r}; perturbing");
            v = g(Complex64::from_polar(r, th2));
            k += 1;
        }
        full += v;
        if j % 2 == 0 {
            half += v;
        }
    }
    (full / n as f64, half / (n / 2) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parse() {
        let g = RadialGrid::parse("10:10000:4:log").unwrap();
        let want = [10.0, 100.0, 1000.0, 10000.0];
        for (a, b) in g.radii().iter().zip(want) {
            assert!((a - b).abs() < 1e-9 * b);
        }
        assert!(RadialGrid::parse("0.5:10:3:log").is_err());
        assert!(RadialGrid::parse("2:10:3:cubic").is_err());
        assert!(RadialGrid::new(vec![3.0, 2.0]).is_err());
        let j: RadialGrid = serde_json::from_str("\"2:4:3:lin\"").unwrap();
        assert_eq!(j.radii(), &[2.0, 3.0, 4.0]);
    }

    #[test]
    fn quadrature_validation() {
        assert!(QuadratureSpec::new(8, 100, 0).is_err());
        assert!(QuadratureSpec::new(0, 64, 0).is_err());
        assert!(QuadratureSpec::new(8, 64, 0).is_ok());
    }

    #[test]
    fn directions_are_seeded() {
        let q = QuadratureSpec::new(4, 64, 7).unwrap();
        let a = q.candidate_lines(2).unwrap();
        let b = q.candidate_lines(2).unwrap();
        assert_eq!(a.len(), 4 + q.resample_limit);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.exact_vector(), y.exact_vector());
            let n: f64 = x.xi().iter().map(|c| c.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
        assert_eq!(q.candidate_lines(1).unwrap().len(), 1);
    }

    #[test]
    fn resampling_skips_rejected_lines() {
        let q = QuadratureSpec {
            n_lines: 3,
            n_theta: 8,
            seed: 1,
            resample_limit: 2,
        };
        let got = q
            .prepare_lines(2, |l| {
                if l.xi()[0].re > 0.0 {
                    Ok(l.xi()[0].re)
                } else {
                    Err(NevError::DegenerateLine("test".into()))
                }
            })
            .map(|v| v.len());
        // either enough positive lines were found or the limit was hit
        match got {
            Ok(n) => assert_eq!(n, 3),
            Err(e) => assert!(matches!(e, NevError::DegenerateLine(_))),
        }
        assert!(q
            .prepare_lines(2, |_| -> Result<()> {
                Err(NevError::DegenerateLine("x".into()))
            })
            .is_err());
    }

    #[test]
    fn circle_mean_of_log_modulus() {
        // mean of log|u| on |u| = r is log r exactly
        let (f, h) = circle_mean(|u| u.norm().ln(), 3.0, 16);
        assert!((f - 3f64.ln()).abs() < 1e-14);
        assert!((h - 3f64.ln()).abs() < 1e-14);
    }
}
