mod cli;
mod commands;
mod config;
mod error;
mod gallery;

use std::fs;
use std::io::Write;

use clap::Parser;

use cli::{Cli, Command, Format, OutputArgs};
use commands::Outcome;
use error::{CliError, EXIT_OK, EXIT_USAGE};
use nevlab::verifier::HypothesisStatus;

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Err(e) = configure_threads() {
        eprintln!("nevlab: {e}");
        return e.exit_code();
    }
    let result = match &cli.command {
        Command::Gallery(a) => gallery::run(a),
        cmd => commands::run(&cli).and_then(|o| {
            let out = commands::output_args(cmd).expect("non-gallery command has output options");
            emit(&o, out, cli.quiet)
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("nevlab: {e}");
            e.exit_code()
        }
    }
}

/// Cap rayon's pool with `NEVLAB_THREADS`.
fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("NEVLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::usage(format!("NEVLAB_THREADS={v:?} is not a positive integer"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::usage(format!("thread pool: {e}")))
}

fn emit(o: &Outcome, out: &OutputArgs, quiet: bool) -> Result<i32, CliError> {
    if !quiet {
        for h in &o.checklist {
            let mark = match h.status {
                HypothesisStatus::Verified => "ok",
                HypothesisStatus::Failed => "FAILED",
                HypothesisStatus::Unchecked => "unchecked",
            };
            eprintln!("hypothesis [{mark}] {}: {}", h.name, h.detail);
        }
        for n in &o.notes {
            eprintln!("note: {n}");
        }
    }
    let json = serde_json::to_string_pretty(&o.json).expect("JSON values always serialize") + "\n";
    if let Some(dir) = &out.out {
        fs::create_dir_all(dir)?;
        let report = dir.join("report.json");
        fs::write(&report, &json)?;
        println!("{}", report.display());
        if let Some(csv) = &o.csv {
            let rows = dir.join("rows.csv");
            fs::write(&rows, csv)?;
            println!("{}", rows.display());
        }
        return Ok(o.code);
    }
    let csv_wanted = match out.format {
        Some(Format::Csv) => true,
        Some(Format::Json) => false,
        None => o.table_first,
    };
    let text = match (&o.csv, csv_wanted) {
        (Some(csv), true) => csv.as_str(),
        (None, true) => {
            return Err(CliError::usage(
                "this command has no CSV rows; use --format json",
            ))
        }
        _ => json.as_str(),
    };
    std::io::stdout().write_all(text.as_bytes())?;
    Ok(o.code)
}
