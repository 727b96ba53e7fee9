use std::path::Path;

use nevlab::filtration::{
    build_filtration, delta_totals, hilbert_stabilization, lift_to_common_degree,
};
use nevlab::funcspace::{HomogeneousForm, ProjectiveMap, SliceFunction};
use nevlab::nevcore::{
    characteristic, fmt_residual, jensen_residual, log_slope, nevanlinna, QuadratureSpec,
    RadialGrid,
};
use nevlab::qops::{
    casorati, decide_casorati, ldl_ratio, monomial_components, shift_counting_ratio, NumericTest,
    QShift, MONOMIAL_CAP,
};
use nevlab::verifier::{
    clunie_check, gundersen_hayman_identity, partition_by_q_ratio, picard_check,
    tumura_clunie_ratio, verify_cartan_smt, verify_hsmt_weil, verify_hypersurface_smt,
    HypothesisCheck, QDiffPolynomial, SmtOptions, SmtReport, Verdict, TREND_FLOOR, TUMURA_FLOOR,
};
use num::complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cli::*;
use crate::config::{load, RunConfig};
use crate::error::{CliError, EXIT_HYPOTHESIS, EXIT_OK};

/// Grid used when neither the command line nor the config gives one.
pub const DEFAULT_GRID: &str = "10:10000:13:log";

/// Result of one command: a JSON report, optional CSV rows and an exit code.
#[derive(Debug)]
pub struct Outcome {
    pub json: Value,
    pub csv: Option<String>,
    pub code: i32,
    /// Print CSV rather than JSON when no format is requested.
    pub table_first: bool,
    pub checklist: Vec<HypothesisCheck>,
    pub notes: Vec<String>,
}

impl Outcome {
    fn report<T: Serialize>(r: &T) -> Result<Outcome, CliError> {
        Ok(Outcome {
            json: to_value(r)?,
            csv: None,
            code: EXIT_OK,
            table_first: false,
            checklist: Vec::new(),
            notes: Vec::new(),
        })
    }

    fn with_rows<R: Serialize>(mut self, rows: &[R]) -> Result<Outcome, CliError> {
        self.csv = Some(to_csv(rows)?);
        Ok(self)
    }

    fn judged(mut self, verdict: Verdict, hyps: &[HypothesisCheck], notes: &[String]) -> Outcome {
        if verdict == Verdict::ReportOnly {
            self.code = EXIT_HYPOTHESIS;
        }
        self.checklist = hyps.to_vec();
        self.notes = notes.to_vec();
        self
    }
}

fn to_value<T: Serialize>(r: &T) -> Result<Value, CliError> {
    serde_json::to_value(r).map_err(|e| CliError::usage(format!("serialization: {e}")))
}

/// Serialize rows as CSV with a header from the field names.
pub fn to_csv<R: Serialize>(rows: &[R]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| CliError::usage(format!("csv: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::usage(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::usage(format!("csv: {e}")))
}

fn quadrature(args: &QuadArgs, base: Option<QuadratureSpec>) -> Result<QuadratureSpec, CliError> {
    let mut q = base.unwrap_or_default();
    if let Some(v) = args.lines {
        q.n_lines = v;
    }
    if let Some(v) = args.theta {
        q.n_theta = v;
    }
    if let Some(v) = args.seed {
        q.seed = v;
    }
    q.validate()?;
    Ok(q)
}

fn grid(args: &QuadArgs, base: Option<RadialGrid>) -> Result<RadialGrid, CliError> {
    match (&args.grid, base) {
        (Some(s), _) => Ok(RadialGrid::parse(s)?),
        (None, Some(g)) => Ok(g),
        (None, None) => Ok(RadialGrid::parse(DEFAULT_GRID)?),
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Nev(a) => nev(a),
        Command::Casorati(a) => casorati_cmd(a),
        Command::Nondegeneracy(a) => nondegeneracy(a),
        Command::Filtration {
            command: FiltrationCommand::Inspect(a),
        } => inspect(a),
        Command::Hilbert(a) => hilbert(a),
        Command::Verify(a) => verify(a),
        Command::Picard(a) => picard(a),
        Command::Partition(a) => partition(a),
        Command::Ldl(a) => ldl(a),
        Command::Gallery(_) => Err(CliError::usage("gallery is handled by the driver")),
    }
}

/// Output options of the command, for the driver.
pub fn output_args(cmd: &Command) -> Option<&OutputArgs> {
    Some(match cmd {
        Command::Nev(a) => &a.output,
        Command::Casorati(a) => &a.output,
        Command::Nondegeneracy(a) => &a.output,
        Command::Filtration {
            command: FiltrationCommand::Inspect(a),
        } => &a.output,
        Command::Hilbert(a) => &a.output,
        Command::Verify(a) => &a.output,
        Command::Picard(a) => &a.output,
        Command::Partition(a) => &a.output,
        Command::Ldl(a) => &a.output,
        Command::Gallery(_) => return None,
    })
}

#[derive(Serialize)]
struct NevRow {
    r: f64,
    m: f64,
    #[serde(rename = "N_zero")]
    n_zero: f64,
    #[serde(rename = "N_pole")]
    n_pole: f64,
    #[serde(rename = "T")]
    t: f64,
    err: f64,
}

#[derive(Serialize)]
struct ValueRow {
    r: f64,
    #[serde(rename = "T")]
    t: f64,
    err: f64,
}

fn nev(a: &NevArgs) -> Result<Outcome, CliError> {
    let quad = quadrature(&a.quad, None)?;
    let grid = grid(&a.quad, None)?;
    let mut out = if let Some(path) = &a.map {
        let f: ProjectiveMap = load(path, "map")?;
        if let Some(fp) = &a.form {
            let form: HomogeneousForm = load(fp, "form")?;
            let rows = fmt_residual(&f, &form, &grid, &quad)?;
            let res: Vec<f64> = rows.iter().map(|r| r.residual).collect();
            let variation = spread(&res);
            Outcome::report(&json!({ "rows": rows, "variation": variation }))?.with_rows(&rows)?
        } else {
            let t = characteristic(&f, &grid, &quad)?;
            let rows: Vec<ValueRow> = t
                .iter()
                .map(|s| ValueRow {
                    r: s.r,
                    t: s.value,
                    err: s.err,
                })
                .collect();
            let slope = (t.len() >= 2).then(|| log_slope(&t));
            Outcome::report(&json!({ "rows": rows, "slope": slope }))?.with_rows(&rows)?
        }
    } else {
        let path = a
            .function
            .as_ref()
            .expect("clap requires --function or --map");
        let h: SliceFunction = load(path, "function")?;
        if a.jensen {
            let rows = jensen_residual(&h, &grid, &quad)?;
            Outcome::report(&json!({ "rows": rows }))?.with_rows(&rows)?
        } else {
            let rows: Vec<NevRow> = nevanlinna(&h, &grid, &quad)?
                .into_iter()
                .map(|s| NevRow {
                    r: s.r,
                    m: s.m_val,
                    n_zero: s.n_zero,
                    n_pole: s.n_pole,
                    t: s.t_val,
                    err: s.err,
                })
                .collect();
            Outcome::report(&json!({ "rows": rows }))?.with_rows(&rows)?
        }
    };
    out.table_first = true;
    Ok(out)
}

fn spread(v: &[f64]) -> f64 {
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

fn load_map_q(map: &Path, q: &Path) -> Result<(ProjectiveMap, QShift), CliError> {
    Ok((load(map, "map")?, load(q, "q")?))
}

#[derive(Serialize)]
struct PointValue {
    z: Vec<[f64; 2]>,
    value: [f64; 2],
}

fn casorati_cmd(a: &CasoratiArgs) -> Result<Outcome, CliError> {
    let (f, q) = load_map_q(&a.map, &a.q)?;
    let cols = match a.alpha {
        Some(alpha) => monomial_components(&f, alpha, MONOMIAL_CAP)?,
        None => f.components().to_vec(),
    };
    let c = casorati(&cols, &q)?;
    let report = match c.as_rational() {
        Some(r) => json!({
            "symbolic": true,
            "size": cols.len(),
            "is_zero": r.is_zero(),
            "display": r.to_string(),
            "num": r.num(),
            "den": r.den(),
        }),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let samples: Vec<PointValue> = (0..8)
                .map(|_| {
                    let z: Vec<Complex64> = (0..f.nvars())
                        .map(|_| {
                            let r = 0.3 + 1.7 * rng.random::<f64>();
                            Complex64::from_polar(r, std::f64::consts::TAU * rng.random::<f64>())
                        })
                        .collect();
                    let v = c.eval_c64(&z);
                    PointValue {
                        z: z.iter().map(|u| [u.re, u.im]).collect(),
                        value: [v.re, v.im],
                    }
                })
                .collect();
            json!({
                "symbolic": false,
                "size": cols.len(),
                "description": c.describe(),
                "samples": samples,
            })
        }
    };
    Outcome::report(&report)
}

fn nondegeneracy(a: &NondegeneracyArgs) -> Result<Outcome, CliError> {
    let (f, q) = load_map_q(&a.map, &a.q)?;
    let test = NumericTest {
        samples: a.samples,
        seed: a.seed,
        threshold: a.threshold,
    };
    let cols = match a.alpha {
        Some(alpha) => monomial_components(&f, alpha, MONOMIAL_CAP)?,
        None => f.components().to_vec(),
    };
    Outcome::report(&decide_casorati(&cols, &q, test)?)
}

fn load_forms(path: &Path, what: &str) -> Result<Vec<HomogeneousForm>, CliError> {
    let forms: Vec<HomogeneousForm> = load(path, what)?;
    if forms.is_empty() {
        return Err(CliError::usage(format!("{what}: empty list of forms")));
    }
    Ok(forms)
}

fn inspect(a: &InspectArgs) -> Result<Outcome, CliError> {
    let gammas = load_forms(&a.gammas, "gammas")?;
    let mut notes = Vec::new();
    let gammas = if gammas.windows(2).any(|w| w[0].degree() != w[1].degree()) {
        let (lifted, d) = lift_to_common_degree(&gammas);
        notes.push(format!("forms lifted to the common degree {d}"));
        lifted
    } else {
        gammas
    };
    let f = build_filtration(&gammas, a.alpha)?;
    let mut out = Outcome::report(&delta_totals(&f)?)?.with_rows(
        &f.levels
            .iter()
            .map(|l| LevelRow {
                tuple: format!("{:?}", l.tuple),
                dim: l.dim,
                quotient: l.quotient,
            })
            .collect::<Vec<_>>(),
    )?;
    out.notes = notes;
    Ok(out)
}

#[derive(Serialize)]
struct LevelRow {
    tuple: String,
    dim: usize,
    quotient: usize,
}

fn hilbert(a: &HilbertArgs) -> Result<Outcome, CliError> {
    let gammas = load_forms(&a.gammas, "gammas")?;
    Outcome::report(&hilbert_stabilization(&gammas)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NumericJson {
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_threshold")]
    threshold: f64,
}

fn default_samples() -> usize {
    NumericTest::default().samples
}

fn default_threshold() -> f64 {
    NumericTest::default().threshold
}

fn smt_outcome(r: SmtReport) -> Result<Outcome, CliError> {
    Ok(Outcome::report(&r)?
        .with_rows(&r.rows)?
        .judged(r.verdict, &r.hypotheses, &r.notes))
}

fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let cfg = RunConfig::load(&a.config)?;
    let quad = quadrature(&a.quad, cfg.get("quad")?)?;
    let grid = grid(&a.quad, cfg.get("grid")?)?;
    let opts = || -> Result<SmtOptions, CliError> {
        let numeric = cfg
            .get::<NumericJson>("numeric")?
            .map(|n| NumericTest {
                samples: n.samples,
                seed: n.seed,
                threshold: n.threshold,
            })
            .unwrap_or_default();
        Ok(SmtOptions {
            trend_floor: cfg.get("trend_floor")?.unwrap_or(TREND_FLOOR),
            numeric,
        })
    };
    match a.theorem {
        Theorem::Cartan | Theorem::Hsmt | Theorem::Hypersurface => {
            let f: ProjectiveMap = cfg.require("map")?;
            let forms: Vec<HomogeneousForm> = cfg.require("forms")?;
            let q: QShift = cfg.require("q")?;
            let o = opts()?;
            let r = match a.theorem {
                Theorem::Cartan => verify_cartan_smt(&f, &forms, &q, &grid, &quad, &o)?,
                Theorem::Hsmt => verify_hsmt_weil(&f, &forms, &q, &grid, &quad, &o)?,
                _ => {
                    let alpha: u32 = cfg.require("alpha")?;
                    verify_hypersurface_smt(&f, &forms, &q, alpha, &grid, &quad, &o)?
                }
            };
            smt_outcome(r)
        }
        Theorem::Gundersen => {
            let f: ProjectiveMap = cfg.require("map")?;
            let forms: Vec<HomogeneousForm> = cfg.require("forms")?;
            let q: QShift = cfg.require("q")?;
            let r = gundersen_hayman_identity(&f, &forms, &q, &grid, &quad)?;
            Outcome::report(&r)?.with_rows(&r.rows)
        }
        Theorem::Picard => {
            let f: ProjectiveMap = cfg.require("map")?;
            let forms: Vec<HomogeneousForm> = cfg.require("forms")?;
            let q: QShift = cfg.require("q")?;
            let r = picard_check(&f, &forms, &q)?;
            Ok(Outcome::report(&r)?.judged(r.verdict, &r.hypotheses, &r.notes))
        }
        Theorem::Clunie => {
            let u: QDiffPolynomial = cfg.require_in("clunie", "u")?;
            let p: QDiffPolynomial = cfg.require_in("clunie", "p")?;
            let big_q: QDiffPolynomial = cfg.require_in("clunie", "q")?;
            let w: SliceFunction = cfg.require_in("clunie", "w")?;
            let r = clunie_check(&u, &p, &big_q, &w, &grid, &quad)?;
            Ok(Outcome::report(&r)?
                .with_rows(&r.rows)?
                .judged(r.verdict, &r.hypotheses, &r.notes))
        }
        Theorem::Tumura => {
            let g: QDiffPolynomial = cfg.require_in("tumura", "g")?;
            let f: SliceFunction = cfg.require_in("tumura", "f")?;
            let floor: f64 = cfg.get_in("tumura", "floor")?.unwrap_or(TUMURA_FLOOR);
            let r = tumura_clunie_ratio(&g, &f, &grid, &quad, floor)?;
            Ok(Outcome::report(&r)?
                .with_rows(&r.rows)?
                .judged(r.verdict, &r.hypotheses, &r.notes))
        }
    }
}

fn picard(a: &PicardArgs) -> Result<Outcome, CliError> {
    let (f, q) = load_map_q(&a.map, &a.q)?;
    let forms = load_forms(&a.forms, "forms")?;
    let r = picard_check(&f, &forms, &q)?;
    Ok(Outcome::report(&r)?.judged(r.verdict, &r.hypotheses, &r.notes))
}

fn partition(a: &PartitionArgs) -> Result<Outcome, CliError> {
    let (f, q) = load_map_q(&a.map, &a.q)?;
    Outcome::report(&partition_by_q_ratio(f.components(), &q)?)
}

fn ldl(a: &LdlArgs) -> Result<Outcome, CliError> {
    let h: SliceFunction = load(&a.function, "function")?;
    let q: QShift = load(&a.q, "q")?;
    let quad = quadrature(&a.quad, None)?;
    let grid = grid(&a.quad, None)?;
    let r = if a.counting {
        shift_counting_ratio(&h, &q, &grid, &quad)?
    } else {
        ldl_ratio(&h, &q, &grid, &quad, a.allow_general_q)?
    };
    let mut out = Outcome::report(&r)?.with_rows(&r.rows)?;
    out.notes = r.notes.clone();
    if r.exploratory {
        out.notes
            .push("exploratory: no correctness claim attaches".into());
    }
    Ok(out)
}
