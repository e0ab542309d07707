use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qexp::harness::{render, run, ReportFormat, RunConfig, SUITES};

/// Residual checks for the quantum exponential toolkit: runs the named check
/// suites on a discretized canonical operator pair and reports every identity
/// as a named residual against its tolerance.  Exit code 0 means every plain
/// check passed and every negative control failed as it must.
#[derive(Parser, Debug)]
#[command(name = "qexp", version, about)]
struct Args {
    /// Deformation index k >= 0 (hbar = pi / (2k + 3) at sign +1)
    #[arg(long, default_value_t = 0)]
    k: u32,

    /// Sign of the deformation parameter (+1 or -1)
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    sign: i8,

    /// Grid size (even, in [64, 1024])
    #[arg(long = "grid-n", default_value_t = 256)]
    grid_n: usize,

    /// Grid window length in log coordinates
    #[arg(long = "grid-length", default_value_t = 24.0)]
    grid_length: f64,

    /// Suite to run (repeatable); defaults to all suites
    #[arg(long = "suite")]
    suite: Vec<String>,

    /// Tolerance override NAME=VALUE (repeatable)
    #[arg(long = "tol", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,

    /// Report format
    #[arg(long = "report", default_value = "json")]
    report: String,

    /// Directory for CSV residual sweeps
    #[arg(long = "csv-dir")]
    csv_dir: Option<PathBuf>,

    /// Seed for the probe-vector family
    #[arg(long = "seed", default_value_t = 7)]
    seed: u64,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let v: f64 = value.parse().map_err(|e| format!("bad tolerance value `{value}`: {e}"))?;
    Ok((name.to_string(), v))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let report_format: ReportFormat = match args.report.parse() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let suites = if args.suite.is_empty() {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        args.suite
    };
    let cfg = RunConfig {
        k: args.k,
        sign: args.sign,
        grid_n: args.grid_n,
        grid_length: args.grid_length,
        tol_overrides: args.tol.into_iter().collect::<BTreeMap<_, _>>(),
        suites,
        report_format,
        csv_dir: args.csv_dir,
        rng_seed: args.seed,
    };
    match run(&cfg) {
        Ok(summary) => {
            println!("{}", render(&summary));
            ExitCode::from(summary.exit_code as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
