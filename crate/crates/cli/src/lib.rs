//! Library side of the `gkw` binary: configuration, commands, verification
//! suites and the row table they all emit.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::fs::File;
use std::io::{self, BufWriter};

use clap::Parser;
use rayon::prelude::*;

pub use config::{Cli, Command, Format, RunConfig, Suite};
pub use output::{read_rows, write_rows, Row};

use commands::Job;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] gkw_core::GkwError),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Exit status of a finished run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    VerifyFailed = 1,
    Usage = 2,
}

/// Compute the rows for `cfg`, sorted by `p`.
pub fn compute(cfg: &RunConfig) -> Result<Vec<Row>, CliError> {
    cfg.validate()?;
    let per_p: Vec<Vec<Row>> = cfg
        .ps
        .par_iter()
        .map(|&p| {
            let job = Job::new(cfg, p)?;
            match cfg.command {
                Command::Lambda => commands::lambda(&job),
                Command::Bounds => commands::bounds_rows(&job),
                Command::Sandwich => commands::sandwich(&job),
                Command::Evolve => commands::evolve(&job),
                Command::Spectrum => commands::spectrum(&job),
                Command::Montecarlo => commands::montecarlo(&job),
                Command::Verify => Ok(verify::verify_p(&job, cfg.suite)),
            }
        })
        .collect::<Result<_, CliError>>()?;
    let mut rows: Vec<Row> = per_p.into_iter().flatten().collect();
    rows.sort_by_key(|r| r.p);
    Ok(rows)
}

/// Compute and write; the status reflects verification outcomes.
pub fn run(cfg: &RunConfig) -> Result<Status, CliError> {
    let rows = compute(cfg)?;
    match &cfg.output {
        Some(path) => {
            let f = File::create(path)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            write_rows(&rows, cfg.format, BufWriter::new(f))?;
        }
        None => write_rows(&rows, cfg.format, io::stdout().lock())?,
    }
    let failed: Vec<&Row> = rows.iter().filter(|r| r.pass == Some(false)).collect();
    if cfg.command == Command::Verify {
        let checked = rows.iter().filter(|r| r.pass.is_some()).count();
        eprintln!(
            "gkw verify: {}/{} checks passed",
            checked - failed.len(),
            checked
        );
        for r in &failed {
            eprintln!("  FAIL p = {} {} = {:e}", r.p, r.quantity, r.value);
        }
    }
    Ok(if failed.is_empty() {
        Status::Ok
    } else {
        Status::VerifyFailed
    })
}

/// Honour `GKW_THREADS` by sizing the global pool.
pub fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("GKW_THREADS") {
        let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::Usage(format!("GKW_THREADS must be a positive integer, got `{v}`"))
        })?;
        // a second initialisation (tests) keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

/// Parse arguments, run, and map the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                Status::Usage as i32
            } else {
                0
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = init_threads()
        .and_then(|_| cli.resolve())
        .and_then(|cfg| run(&cfg));
    match outcome {
        Ok(status) => status as i32,
        Err(e) => {
            eprintln!("gkw: {e}");
            Status::Usage as i32
        }
    }
}
