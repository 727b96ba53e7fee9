use std::f64::consts::LN_2;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde_json::{json, Value};

use crate::cli::{Cli, Command, GalleryArgs};
use crate::commands;
use crate::error::{CliError, EXIT_HYPOTHESIS, EXIT_OK, EXIT_USAGE};

/// Expectation on every JSON value matched by a pointer.
#[derive(Debug, Clone)]
pub enum Expect {
    Approx(f64, f64),
    Equal(Value),
    AtLeast(f64),
    AbsAtMost(f64),
    /// The matched sequence is strictly decreasing.
    Decreasing,
}

#[derive(Debug, Clone)]
pub struct Check {
    /// JSON pointer; a `*` segment matches every array element.
    pub pointer: &'static str,
    pub expect: Expect,
}

#[derive(Debug, Clone)]
pub struct Case {
    pub name: &'static str,
    pub about: &'static str,
    /// Where the expected values come from.
    pub provenance: &'static str,
    /// Arguments after `nevlab`; `@/` expands to the configs directory.
    pub args: &'static [&'static str],
    pub code: i32,
    pub checks: Vec<Check>,
}

fn c(pointer: &'static str, expect: Expect) -> Check {
    Check { pointer, expect }
}

/// `½ log 2 − ½ log(1 + 1/r²)`: margin of the three-line case at radius `r`.
fn cartan_margin(r: f64) -> f64 {
    0.5 * LN_2 - 0.5 * (1.0 + 1.0 / (r * r)).ln()
}

pub fn cases() -> Vec<Case> {
    use Expect::*;
    vec![
        Case {
            name: "jensen_rational",
            about: "Jensen residual of 1/(z - 2) vanishes",
            provenance: "exact identity",
            args: &[
                "nev",
                "--function",
                "@/h_pole2.json",
                "--jensen",
                "--grid",
                "3:1000:8:log",
            ],
            code: EXIT_OK,
            checks: vec![c("/rows/*/value", AbsAtMost(1e-6))],
        },
        Case {
            name: "nev_rational",
            about: "m, N and T of 1/(z - 2)",
            provenance: "closed form: N = log(r/2), m = 0 for r >= 3",
            args: &[
                "nev",
                "--function",
                "@/h_pole2.json",
                "--grid",
                "10:1000:3:log",
            ],
            code: EXIT_OK,
            checks: vec![
                c("/rows/0/N_pole", Approx(5f64.ln(), 1e-9)),
                c("/rows/2/N_pole", Approx(500f64.ln(), 1e-9)),
                c("/rows/*/m", AbsAtMost(1e-9)),
                c("/rows/*/N_zero", AbsAtMost(1e-12)),
            ],
        },
        Case {
            name: "characteristic_slope",
            about: "T of [1, z^3] grows like 3 log r",
            provenance: "closed form: T = ½log(1 + r^6) − ½log 2",
            args: &[
                "nev",
                "--map",
                "@/map_1_z3.json",
                "--grid",
                "100:10000:5:log",
            ],
            code: EXIT_OK,
            checks: vec![
                c("/slope", Approx(3.0, 0.03)),
                c(
                    "/rows/0/T",
                    Approx(0.5 * (1e12f64 + 1.0).ln() - 0.5 * LN_2, 1e-6),
                ),
            ],
        },
        Case {
            name: "first_main_theorem",
            about: "m + N − T for [1, z] and x0 + x1 is constant",
            provenance: "exact identity up to a bounded term",
            args: &[
                "nev",
                "--map",
                "@/map_1_z.json",
                "--form",
                "@/form_x0_plus_x1.json",
            ],
            code: EXIT_OK,
            checks: vec![c("/variation", AbsAtMost(0.05))],
        },
        Case {
            name: "ldl_identity",
            about: "m(r, h(2z)/h(z)) / T(r, h) for h = z",
            provenance: "closed form: log 2 / log r",
            args: &[
                "ldl",
                "--function",
                "@/h_z.json",
                "--q",
                "@/q2.json",
                "--grid",
                "100:10000:3:log",
            ],
            code: EXIT_OK,
            checks: vec![
                c("/rows/0/ratio", Approx(LN_2 / 100f64.ln(), 1e-9)),
                c("/rows/2/ratio", Approx(LN_2 / 1e4f64.ln(), 1e-9)),
            ],
        },
        Case {
            name: "ldl_pochhammer",
            about: "the same ratio for (z; 1/2)_inf decreases over the top decade",
            provenance: "growth argument: the shift ratio is bounded while T grows like (log r)^2",
            args: &[
                "ldl",
                "--function",
                "@/h_pochhammer.json",
                "--q",
                "@/q2.json",
                "--grid",
                "1000:10000:5:log",
            ],
            code: EXIT_OK,
            checks: vec![c("/rows/*/ratio", Decreasing)],
        },
        Case {
            name: "ldl_general_q",
            about: "non-diagonal q runs only as a labeled experiment",
            provenance: "command contract",
            args: &[
                "ldl",
                "--function",
                "@/h_z1_plus_z2.json",
                "--q",
                "@/q23.json",
                "--allow-general-q",
                "--lines",
                "8",
                "--grid",
                "10:100:2:log",
            ],
            code: EXIT_OK,
            checks: vec![c("/exploratory", Equal(json!(true)))],
        },
        Case {
            name: "ldl_guard",
            about: "non-diagonal q without the flag is refused",
            provenance: "command contract",
            args: &[
                "ldl",
                "--function",
                "@/h_z1_plus_z2.json",
                "--q",
                "@/q23.json",
                "--lines",
                "8",
            ],
            code: EXIT_HYPOTHESIS,
            checks: vec![],
        },
        Case {
            name: "shift_counting_rational",
            about: "N(r, h(2z)) / N(r, h) for h = 1/(z - 1)",
            provenance: "closed form: both poles count as log r from radius 1",
            args: &[
                "ldl",
                "--counting",
                "--function",
                "@/h_pole1.json",
                "--q",
                "@/q2.json",
                "--grid",
                "10:10000:4:log",
            ],
            code: EXIT_OK,
            checks: vec![c("/rows/*/ratio", Approx(1.0, 1e-9))],
        },
        Case {
            name: "casorati_vandermonde",
            about: "C(1, z, z^2) with q = 2",
            provenance: "closed form: (2 − 1)(4 − 1)(4 − 2) z^3",
            args: &[
                "casorati",
                "--map",
                "@/map_vandermonde.json",
                "--q",
                "@/q2.json",
            ],
            code: EXIT_OK,
            checks: vec![
                c("/symbolic", Equal(json!(true))),
                c("/num/terms/0/exps", Equal(json!([3]))),
                c("/num/terms/0/re", Equal(json!("6"))),
                c("/den/terms/0/exps", Equal(json!([0]))),
            ],
        },
        Case {
            name: "casorati_monomials",
            about: "generalized Casoratian of [1, z] in degree 2",
            provenance: "closed form: C(1, z, z^2) with q = 2",
            args: &[
                "casorati",
                "--map",
                "@/map_1_z.json",
                "--q",
                "@/q2.json",
                "--alpha",
                "2",
            ],
            code: EXIT_OK,
            checks: vec![
                c("/size", Equal(json!(3))),
                c("/num/terms/0/exps", Equal(json!([3]))),
            ],
        },
        Case {
            name: "casorati_missing_q",
            about: "a missing q file is a usage error",
            provenance: "command contract",
            args: &[
                "casorati",
                "--map",
                "@/map_vandermonde.json",
                "--q",
                "@/missing.json",
            ],
            code: EXIT_USAGE,
            checks: vec![],
        },
        Case {
            name: "nondegeneracy_dependent",
            about: "[z, 2z] is linearly dependent over the constants",
            provenance: "hand computation",
            args: &[
                "nondegeneracy",
                "--map",
                "@/map_z_2z.json",
                "--q",
                "@/q2.json",
            ],
            code: EXIT_OK,
            checks: vec![
                c("/verdict", Equal(json!("degenerate"))),
                c("/symbolic", Equal(json!(true))),
            ],
        },
        Case {
            name: "nondegeneracy_pochhammer",
            about: "[1, (z; 1/2)_inf] is nondegenerate, decided by sampling",
            provenance: "hand computation: the product is not q-periodic",
            args: &[
                "nondegeneracy",
                "--map",
                "@/map_1_poch.json",
                "--q",
                "@/q2.json",
            ],
            code: EXIT_OK,
            checks: vec![
                c("/verdict", Equal(json!("nondegenerate"))),
                c("/symbolic", Equal(json!(false))),
            ],
        },
        Case {
            name: "filtration_lines",
            about: "x1, x2 in P^2 with alpha = 4",
            provenance: "closed form: Delta = C(alpha + 2, 3), M = C(alpha + 2, 2)",
            args: &[
                "filtration",
                "inspect",
                "--gammas",
                "@/lines_x1_x2.json",
                "--alpha",
                "4",
            ],
            code: EXIT_OK,
            checks: vec![
                c("/delta", Equal(json!(20))),
                c("/M", Equal(json!(15))),
                c("/levels/*/quotient", Equal(json!(1))),
            ],
        },
        Case {
            name: "filtration_conics",
            about: "x1^2 − x0^2, x2^2 − x0^2 with alpha = 8",
            provenance: "closed form from the complete-intersection Hilbert function",
            args: &[
                "filtration",
                "inspect",
                "--gammas",
                "@/conics.json",
                "--alpha",
                "8",
            ],
            code: EXIT_OK,
            checks: vec![
                c("/delta", Equal(json!(50))),
                c("/delta_per_j", Equal(json!([50, 50]))),
                c("/M", Equal(json!(45))),
                c("/ratios/m_alpha_over_delta", Approx(7.2, 1e-12)),
            ],
        },
        Case {
            name: "filtration_too_large",
            about: "alpha = 40 exceeds the column cap",
            provenance: "command contract",
            args: &[
                "filtration",
                "inspect",
                "--gammas",
                "@/conics.json",
                "--alpha",
                "40",
            ],
            code: EXIT_USAGE,
            checks: vec![],
        },
        Case {
            name: "hilbert_conics",
            about: "two conics meet in four points",
            provenance: "Bezout count",
            args: &["hilbert", "--gammas", "@/conics.json"],
            code: EXIT_OK,
            checks: vec![
                c("/verdict", Equal(json!("zero_dimensional"))),
                c("/stable_value", Equal(json!(4))),
            ],
        },
        Case {
            name: "cartan_p3",
            about: "[1, z] against three lines, q = 2",
            provenance: "closed form: margin = ½log 2 − ½log(1 + 1/r^2)",
            args: &["verify", "cartan", "--config", "@/cartan_p3.json"],
            code: EXIT_OK,
            checks: vec![
                c("/verdict", Equal(json!("pass"))),
                c("/rows/0/margin", Approx(cartan_margin(10.0), 1e-6)),
                c("/rows/12/margin", Approx(cartan_margin(1e4), 1e-6)),
                c("/rows/*/margin", AtLeast(-0.1)),
                c("/trend", AtLeast(-0.05)),
            ],
        },
        Case {
            name: "hypersurface_lines",
            about: "the hypersurface harness with alpha = d = 1 reproduces the Cartan margins",
            provenance: "closed form of the Cartan case",
            args: &[
                "verify",
                "hypersurface",
                "--config",
                "@/hypersurface_n1.json",
            ],
            code: EXIT_OK,
            checks: vec![
                c("/verdict", Equal(json!("pass"))),
                c("/rows/0/margin", Approx(cartan_margin(10.0), 1e-6)),
                c("/rows/12/margin", Approx(cartan_margin(1e4), 1e-6)),
            ],
        },
        Case {
            name: "hsmt_weil",
            about: "Weil-function form of the same case",
            provenance: "closed form: margin tends to −(3/2) log 2",
            args: &["verify", "hsmt", "--config", "@/cartan_p3.json"],
            code: EXIT_OK,
            checks: vec![
                c("/verdict", Equal(json!("pass"))),
                c("/rows/12/margin", Approx(-1.5 * LN_2, 1e-3)),
            ],
        },
        Case {
            name: "gundersen_hayman",
            about: "divisor identity for the Cartan case",
            provenance: "exact identity; L = (1 + z)/(q − 1)",
            args: &["verify", "gundersen", "--config", "@/cartan_p3.json"],
            code: EXIT_OK,
            checks: vec![
                c("/variation", AbsAtMost(1e-4)),
                c("/rows/0/lhs", Approx(10f64.ln(), 1e-9)),
            ],
        },
        Case {
            name: "picard_m2",
            about: "[z1, z2] with three lines and q = (2, 2) is projectively q-invariant",
            provenance: "hand computation",
            args: &["verify", "picard", "--config", "@/picard_m2.json"],
            code: EXIT_OK,
            checks: vec![
                c("/verdict", Equal(json!("pass"))),
                c("/failed", Equal(json!([]))),
                c("/q_invariant_map", Equal(json!(true))),
                c("/partition/classes", Equal(json!([[0, 1, 2]]))),
            ],
        },
        Case {
            name: "picard_power",
            about: "1 + z^3 = 0 is not a forward invariant preimage",
            provenance: "hand computation",
            args: &[
                "picard",
                "--map",
                "@/map_1_z3.json",
                "--forms",
                "@/lines_p1.json",
                "--q",
                "@/q2.json",
            ],
            code: EXIT_HYPOTHESIS,
            checks: vec![
                c("/failed", Equal(json!([2]))),
                c("/invariant", Equal(json!([true, true, false]))),
            ],
        },
        Case {
            name: "partition_three",
            about: "(1, z, 2z) under q = 2",
            provenance: "hand computation",
            args: &[
                "partition",
                "--map",
                "@/map_1_z_2z.json",
                "--q",
                "@/q2.json",
            ],
            code: EXIT_OK,
            checks: vec![c("/classes", Equal(json!([[0], [1, 2]])))],
        },
        Case {
            name: "clunie_small_coefficient",
            about: "U = w, P = 1/(z − 3) with w = (z; 1/2)_inf",
            provenance: "growth argument: m(r, P) tends to 0 while T_w grows",
            args: &["verify", "clunie", "--config", "@/clunie_poch.json"],
            code: EXIT_OK,
            checks: vec![
                c("/verdict", Equal(json!("pass"))),
                c("/identity", Equal(json!("numeric"))),
            ],
        },
        Case {
            name: "tumura_control",
            about: "(z; 1/2)_inf violates the zero-scarcity hypothesis",
            provenance: "growth argument: its zeros carry all of T",
            args: &["verify", "tumura", "--config", "@/tumura_poch.json"],
            code: EXIT_HYPOTHESIS,
            checks: vec![
                c("/verdict", Equal(json!("report_only"))),
                c("/floor_check", Equal(Value::Null)),
            ],
        },
        Case {
            name: "config_unknown_key",
            about: "a misspelled config key is rejected",
            provenance: "command contract",
            args: &["verify", "cartan", "--config", "@/bad_key.json"],
            code: EXIT_USAGE,
            checks: vec![],
        },
    ]
}

/// Directory of the bundled configurations.
pub fn default_configs() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/configs"))
}

fn select<'a>(v: &'a Value, segs: &[&str], out: &mut Vec<&'a Value>) {
    let Some((head, rest)) = segs.split_first() else {
        out.push(v);
        return;
    };
    match (*head, v) {
        ("*", Value::Array(a)) => a.iter().for_each(|x| select(x, rest, out)),
        (k, Value::Array(a)) => {
            if let Some(x) = k.parse::<usize>().ok().and_then(|i| a.get(i)) {
                select(x, rest, out)
            }
        }
        (k, Value::Object(o)) => {
            if let Some(x) = o.get(k) {
                select(x, rest, out)
            }
        }
        _ => {}
    }
}

fn evaluate(json: &Value, check: &Check) -> Result<(), String> {
    let segs: Vec<&str> = check.pointer.split('/').skip(1).collect();
    let mut found = Vec::new();
    select(json, &segs, &mut found);
    if found.is_empty() {
        return Err(format!("{}: not present", check.pointer));
    }
    let num = |v: &Value| {
        v.as_f64()
            .ok_or_else(|| format!("{}: {v} is not a number", check.pointer))
    };
    match &check.expect {
        Expect::Decreasing => {
            let xs = found
                .iter()
                .map(|v| num(v))
                .collect::<Result<Vec<_>, _>>()?;
            if xs.windows(2).all(|w| w[1] < w[0]) {
                Ok(())
            } else {
                Err(format!("{}: {xs:?} is not decreasing", check.pointer))
            }
        }
        e => {
            for v in found {
                let ok = match e {
                    Expect::Approx(x, tol) => (num(v)? - x).abs() <= *tol,
                    Expect::Equal(x) => v == x,
                    Expect::AtLeast(x) => num(v)? >= *x,
                    Expect::AbsAtMost(x) => num(v)?.abs() <= *x,
                    Expect::Decreasing => unreachable!(),
                };
                if !ok {
                    return Err(format!("{}: got {v}, expected {e:?}", check.pointer));
                }
            }
            Ok(())
        }
    }
}

/// Run one case; `Err` carries the mismatch.
pub fn run_case(case: &Case, configs: &Path) -> Result<(), String> {
    let prefix = format!("{}/", configs.display());
    let args = std::iter::once("nevlab".to_string())
        .chain(case.args.iter().map(|a| a.replace("@/", &prefix)));
    let cli = Cli::try_parse_from(args).map_err(|e| format!("arguments: {e}"))?;
    if matches!(cli.command, Command::Gallery(_)) {
        return Err("gallery cases cannot nest".into());
    }
    let (code, json) = match commands::run(&cli) {
        Ok(o) => (o.code, o.json),
        Err(e) => (e.exit_code(), Value::Null),
    };
    if code != case.code {
        return Err(format!("exit code {code}, expected {}", case.code));
    }
    case.checks.iter().try_for_each(|c| evaluate(&json, c))
}

pub fn run(a: &GalleryArgs) -> Result<i32, CliError> {
    let all = cases();
    if a.list {
        for c in &all {
            println!("{:<28} {}  [{}]", c.name, c.about, c.provenance);
        }
        return Ok(EXIT_OK);
    }
    let configs = a.configs.clone().unwrap_or_else(default_configs);
    let chosen: Vec<&Case> = match &a.name {
        Some(n) => match all.iter().find(|c| c.name == n) {
            Some(c) => vec![c],
            None => {
                return Err(CliError::usage(format!(
                    "unknown gallery case {n:?}; see --list"
                )))
            }
        },
        None => all.iter().collect(),
    };
    let mut failed = Vec::new();
    println!("{:<28} {:<6} detail", "case", "result");
    for c in &chosen {
        match run_case(c, &configs) {
            Ok(()) => println!("{:<28} {:<6} {}", c.name, "pass", c.about),
            Err(e) => {
                println!("{:<28} {:<6} {e}", c.name, "FAIL");
                failed.push(c.name);
            }
        }
    }
    println!(
        "{} of {} cases passed",
        chosen.len() - failed.len(),
        chosen.len()
    );
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!("failed cases: {}", failed.join(", "));
        Ok(EXIT_USAGE)
    }
}
