//! `strata`: run the Fréchet mean and collapse pipeline on a JSON config.

mod commands;
mod config;
mod error;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use commands::{Command, Settings};
use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "strata", version, about = "Fréchet means and tangential collapse on stratified cones")]
struct Cli {
    command: Command,
    /// Experiment config (optional for `verify`).
    config: Option<PathBuf>,
    /// Membership tolerance for escape and fluctuating cones.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Compare the mean with the brute-force grid oracle.
    #[arg(long)]
    oracle: bool,
    /// Write the command's atom or result table as CSV.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[cfg(feature = "parallel")]
fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("STRATA_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::invalid("STRATA_THREADS", format!("{raw:?} is not a positive integer")))?;
    // fails only if a pool already exists, which cannot happen this early
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() -> Result<()> {
    Ok(())
}

fn write_file(path: &PathBuf, f: impl FnOnce(&mut std::fs::File) -> Result<()>) -> Result<()> {
    let io = |source| CliError::Io {
        path: path.clone(),
        source,
    };
    let mut file = std::fs::File::create(path).map_err(io)?;
    f(&mut file)?;
    file.flush().map_err(io)
}

fn run(cli: &Cli) -> Result<Option<String>> {
    configure_threads()?;
    let exp = cli.config.as_deref().map(config::parse_config).transpose()?;
    let file = exp.as_ref().map(|e| &e.file);
    let tol = cli.tol.or(file.and_then(|f| f.tol)).unwrap_or_else(commands::default_tol);
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(CliError::invalid("tol", format!("{tol} is not a nonnegative number")));
    }
    let settings = Settings {
        tol,
        seed: cli.seed.or(file.and_then(|f| f.seed)).unwrap_or(0),
        oracle: cli.oracle,
    };
    let out = commands::run(cli.command, exp.as_ref(), settings)?;
    let envelope = json!({
        "command": cli.command.name(),
        "config": cli.config.as_ref().map(|p| p.display().to_string()),
        "config_hash": exp.as_ref().map(|e| e.hash.clone()),
        "seed": settings.seed,
        "tol": settings.tol,
        "version": env!("CARGO_PKG_VERSION"),
        "result": out.result,
    });
    let text = report::to_json(&envelope);
    match &cli.out {
        Some(path) => write_file(path, |f| {
            f.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })
        })?,
        None => print!("{text}"),
    }
    if let (Some(path), Some(table)) = (&cli.csv, &out.table) {
        write_file(path, |f| Ok(table.write(f)?))?;
    }
    Ok(out.failure)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let start = Instant::now();
    let code = match run(&cli) {
        Ok(None) => 0,
        Ok(Some(failure)) => {
            eprintln!("strata: {failure}");
            2
        }
        Err(e) => {
            eprintln!("strata: {e}");
            e.exit_code()
        }
    };
    eprintln!("strata: {} finished in {:.3}s", cli.command.name(), start.elapsed().as_secs_f64());
    ExitCode::from(code)
}
