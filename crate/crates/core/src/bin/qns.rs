//! `qns <experiment> --config <path> [--seed N] [--out DIR]`
//!
//! Exit codes: 0 success, 2 invalid arguments or configuration, 3 runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use qns::harness::{run_pipeline, Experiment, ExperimentConfig, HarnessError};
use qns::QnsError;

const USAGE: &str = "usage: qns <experiment> --config <path> [--seed N] [--out DIR]
experiments: truncation-scan, qns-estimate, optimize-dd, predict-random, resources-table";

struct Args {
    experiment: Experiment,
    config: PathBuf,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

fn parse_args(mut args: impl Iterator<Item = String>) -> Result<Args, String> {
    let experiment = args.next().ok_or("missing experiment")?;
    if experiment == "-h" || experiment == "--help" {
        return Err(String::new());
    }
    let experiment = experiment.parse::<Experiment>().map_err(|e| e.to_string())?;
    let (mut config, mut seed, mut out) = (None, None, None);
    while let Some(flag) = args.next() {
        let mut value = || args.next().ok_or(format!("{flag} needs a value"));
        match flag.as_str() {
            "--config" => config = Some(PathBuf::from(value()?)),
            "--seed" => seed = Some(value()?.parse().map_err(|_| "--seed expects a non-negative integer")?),
            "--out" => out = Some(PathBuf::from(value()?)),
            other => return Err(format!("unknown argument '{other}'")),
        }
    }
    Ok(Args { experiment, config: config.ok_or("missing --config")?, seed, out })
}

fn main() -> ExitCode {
    let args = match parse_args(std::env::args().skip(1)) {
        Ok(a) => a,
        Err(msg) => {
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            eprintln!("{USAGE}");
            return ExitCode::from(2);
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(args: &Args) -> Result<(), HarnessError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| HarnessError::Validation(QnsError::Config(format!("{}: {e}", args.config.display()))))?;
    let mut config = ExperimentConfig::parse(args.experiment, &text).map_err(HarnessError::Validation)?;
    if let Some(seed) = args.seed {
        config.set("seed", seed);
    }
    if let Some(out) = &args.out {
        config.set("out", out.display());
    }
    let artifacts = run_pipeline(&config)?;
    let written = artifacts.write_all(&config.out_dir()).map_err(HarnessError::Runtime)?;
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}
