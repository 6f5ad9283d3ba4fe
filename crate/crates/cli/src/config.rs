//! Command-line flags, the flat `key=value` config file, and their merge into
//! a validated [`RunConfig`]. Flags win over the file; defaults fill the rest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};

use crate::CliError;

pub const DEFAULT_DEGREE: usize = 64;
pub const DEFAULT_CUTOFF: usize = 10_000;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_STEPS: usize = 30;
pub const DEFAULT_SAMPLES: usize = 1_000_000;
pub const DEFAULT_VERIFY_RANGE: (u32, u32) = (2, 10);

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// lambda_p by both estimators, with bounds and diagnostics
    Lambda,
    /// closed-form bounds v_p, w_p
    Bounds,
    /// grid check of v_p xi <= V xi <= w_p xi
    Sandwich,
    /// evolution of the Lebesgue distribution function
    Evolve,
    /// collocation spectrum of G_p and conjecture ratios
    Spectrum,
    /// Monte Carlo distribution function of T_p^n
    Montecarlo,
    /// run verification suites; exit 1 on any failure
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Sandwich,
    Estimators,
    Bounds,
    Kuzmin,
    Tail,
    Wirsing,
    Spectrum,
    Anchor,
    All,
}

#[derive(Debug, Parser)]
#[command(
    name = "gkw",
    version,
    about = "Gauss–Kuzmin–Wirsing constants of the maps T_p(x) = {p/x}"
)]
pub struct Cli {
    /// Command to run (may also come from the config file)
    #[arg(value_enum)]
    pub command: Option<Command>,

    /// Single map parameter
    #[arg(long)]
    pub p: Option<u32>,

    /// Inclusive parameter range `a..b`
    #[arg(long = "p-range", value_name = "A..B")]
    pub p_range: Option<String>,

    /// Chebyshev degree N (collocation dimension for `spectrum`)
    #[arg(long)]
    pub degree: Option<usize>,

    /// Series cutoff K
    #[arg(long)]
    pub cutoff: Option<usize>,

    /// Solver tolerance
    #[arg(long)]
    pub tol: Option<f64>,

    /// Evolution / iteration steps n
    #[arg(long)]
    pub steps: Option<usize>,

    /// Monte Carlo samples
    #[arg(long)]
    pub samples: Option<usize>,

    /// Monte Carlo seed
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Output file (stdout if absent)
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Verification suite
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,

    /// Flat key=value config file; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Use bare truncation of the operator series
    #[arg(long = "no-tail-correction")]
    pub no_tail_correction: bool,
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub ps: Vec<u32>,
    pub degree: usize,
    pub cutoff: usize,
    pub tol: f64,
    pub steps: usize,
    pub samples: usize,
    pub seed: Option<u64>,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub suite: Suite,
    pub tail_correction: bool,
}

impl RunConfig {
    /// Defaults for `command` over `ps`.
    pub fn new(command: Command, ps: Vec<u32>) -> Self {
        Self {
            command,
            ps,
            degree: DEFAULT_DEGREE,
            cutoff: DEFAULT_CUTOFF,
            tol: DEFAULT_TOL,
            steps: DEFAULT_STEPS,
            samples: DEFAULT_SAMPLES,
            seed: None,
            format: Format::Json,
            output: None,
            suite: Suite::All,
            tail_correction: true,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.ps.is_empty() {
            return Err(CliError::Usage("empty parameter range".into()));
        }
        if self.ps.contains(&0) {
            return Err(CliError::Usage("p must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Usage(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.degree < 2 {
            return Err(CliError::Usage("degree must be at least 2".into()));
        }
        if self.command == Command::Spectrum && self.degree < 8 {
            return Err(CliError::Usage("spectrum needs --degree >= 8".into()));
        }
        let p_max = *self.ps.iter().max().expect("nonempty");
        if self.cutoff < p_max as usize + 1 {
            return Err(CliError::Usage(format!(
                "cutoff {} must be at least p + 1 = {}",
                self.cutoff,
                p_max + 1
            )));
        }
        if self.command == Command::Montecarlo {
            if self.seed.is_none() {
                return Err(CliError::Usage("montecarlo requires --seed".into()));
            }
            if self.samples < gkw_core::evolution::MIN_SAMPLES {
                return Err(CliError::Usage(format!(
                    "montecarlo needs at least {} samples",
                    gkw_core::evolution::MIN_SAMPLES
                )));
            }
        }
        Ok(())
    }
}

/// Parse `a..b` (inclusive), `a..=b` or a single `a`.
pub fn parse_range(s: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::Usage(format!("invalid range `{s}`, expected A..B"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim().trim_start_matches('=')),
        None => (s.trim(), s.trim()),
    };
    let a: u32 = a.parse().map_err(|_| bad())?;
    let b: u32 = b.parse().map_err(|_| bad())?;
    if a > b {
        return Err(CliError::Usage(format!("empty range `{s}`")));
    }
    Ok((a..=b).collect())
}

/// Parse a flat `key=value` file. `#` starts a comment; blank lines are skipped.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn value<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    map.get(key)
        .map(|v| {
            v.parse()
                .map_err(|_| CliError::Usage(format!("config key `{key}`: cannot parse `{v}`")))
        })
        .transpose()
}

fn enum_value<T: ValueEnum>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    map.get(key)
        .map(|v| {
            T::from_str(v, true)
                .map_err(|_| CliError::Usage(format!("config key `{key}`: unknown value `{v}`")))
        })
        .transpose()
}

const KNOWN_KEYS: &[&str] = &[
    "command",
    "p",
    "p-range",
    "degree",
    "cutoff",
    "tol",
    "steps",
    "samples",
    "seed",
    "format",
    "output",
    "suite",
    "tail-correction",
];

fn load_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let map = parse_config_file(&text)?;
    if let Some(k) = map.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(CliError::Usage(format!("unknown config key `{k}`")));
    }
    Ok(map)
}

impl Cli {
    /// Merge flags over the config file over defaults, then validate.
    pub fn resolve(self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => load_file(path)?,
            None => BTreeMap::new(),
        };
        let command = match self.command {
            Some(c) => c,
            None => enum_value(&file, "command")?
                .ok_or_else(|| CliError::Usage("no command given".into()))?,
        };

        let p = self.p.or(value(&file, "p")?);
        let range = self
            .p_range
            .clone()
            .or_else(|| file.get("p-range").cloned());
        // a flag on either spelling overrides the file on both
        let (p, range) = match (self.p, &self.p_range) {
            (Some(_), None) => (p, None),
            (None, Some(_)) => (None, range),
            _ => (p, range),
        };
        let ps = match (p, range) {
            (Some(_), Some(_)) => {
                return Err(CliError::Usage(
                    "give either --p or --p-range, not both".into(),
                ))
            }
            (Some(p), None) => vec![p],
            (None, Some(r)) => parse_range(&r)?,
            (None, None) if command == Command::Verify => {
                (DEFAULT_VERIFY_RANGE.0..=DEFAULT_VERIFY_RANGE.1).collect()
            }
            (None, None) => return Err(CliError::Usage("missing --p or --p-range".into())),
        };

        let mut cfg = RunConfig::new(command, ps);
        cfg.degree = self
            .degree
            .or(value(&file, "degree")?)
            .unwrap_or(cfg.degree);
        cfg.cutoff = self
            .cutoff
            .or(value(&file, "cutoff")?)
            .unwrap_or(cfg.cutoff);
        cfg.tol = self.tol.or(value(&file, "tol")?).unwrap_or(cfg.tol);
        cfg.steps = self.steps.or(value(&file, "steps")?).unwrap_or(cfg.steps);
        cfg.samples = self
            .samples
            .or(value(&file, "samples")?)
            .unwrap_or(cfg.samples);
        cfg.seed = self.seed.or(value(&file, "seed")?);
        cfg.format = self
            .format
            .or(enum_value(&file, "format")?)
            .unwrap_or(cfg.format);
        cfg.output = self
            .output
            .or_else(|| file.get("output").map(PathBuf::from));
        cfg.suite = self
            .suite
            .or(enum_value(&file, "suite")?)
            .unwrap_or(cfg.suite);
        cfg.tail_correction = if self.no_tail_correction {
            false
        } else {
            value(&file, "tail-correction")?.unwrap_or(true)
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
