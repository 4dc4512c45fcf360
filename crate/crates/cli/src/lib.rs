//! Batch verification driver for the finite-level realizations.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

pub mod report;
pub mod suites;

use report::{RunReport, Status, SuiteReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Hard limits; larger values are refused with a cap error.
pub const HARD_LEVEL: u32 = 3;
pub const HARD_DEGREE: u32 = 5;
pub const HARD_DEPTH: u32 = koopman_core::montecarlo::MAX_SAMPLE_DEPTH;
pub const HARD_SAMPLES: u64 = koopman_core::montecarlo::MAX_SAMPLES;

pub const REPORT_DIR_ENV: &str = "KOOPMAN_REPORT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Fock space norms, embeddings and the torus action
    VerifyFock,
    /// Step-function realization on symmetrized cylinder grids
    VerifyAlpha,
    /// Gaussian polynomial realization and the Wick oracle
    VerifyBeta,
    /// Compatibility of both realizations with the level embedding
    VerifyCoherence,
    /// Convergence rates of centered averages
    VerifyDensity,
    /// Spectral table, measure semigroup and the scaling constraint
    VerifySpectral,
    /// Monte Carlo cross-check on sampled trees
    Simulate,
    /// Every suite
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyFock => "verify-fock",
            Command::VerifyAlpha => "verify-alpha",
            Command::VerifyBeta => "verify-beta",
            Command::VerifyCoherence => "verify-coherence",
            Command::VerifyDensity => "verify-density",
            Command::VerifySpectral => "verify-spectral",
            Command::Simulate => "simulate",
            Command::All => "all",
        }
    }

    fn suites(self) -> Vec<Command> {
        match self {
            Command::All => vec![
                Command::VerifyFock,
                Command::VerifyAlpha,
                Command::VerifyBeta,
                Command::VerifyCoherence,
                Command::VerifyDensity,
                Command::VerifySpectral,
                Command::Simulate,
            ],
            c => vec![c],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Text => "txt",
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Parser, Debug, Clone)]
#[command(name = "koopman", version, about = "Run the finite-level verification suites")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Largest level n of binary words
    #[arg(long, global = true, default_value_t = 2)]
    pub level_max: u32,
    /// Largest degree l of basic vectors
    #[arg(long, global = true, default_value_t = 4)]
    pub degree_max: u32,
    /// Largest cylinder or sample-tree depth
    #[arg(long, global = true, default_value_t = 10)]
    pub depth_max: u32,
    /// Monte Carlo sample count
    #[arg(long, global = true, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Backend::Exact)]
    pub backend: Backend,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Order of the roots of unity used for random torus elements
    #[arg(long, global = true, default_value_t = 8)]
    pub phase_order: u32,
    /// Report file; defaults to stdout, or to a file in the report directory
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, env = REPORT_DIR_ENV)]
    pub report_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub level_max: u32,
    pub degree_max: u32,
    pub depth_max: u32,
    pub samples: u64,
    pub seed: u64,
    pub backend: Backend,
    pub format: Format,
    pub phase_order: u32,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::All,
            level_max: 2,
            degree_max: 4,
            depth_max: 10,
            samples: 100_000,
            seed: 0,
            backend: Backend::Exact,
            format: Format::Text,
            phase_order: 8,
            output: None,
        }
    }
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        let output = c.output.or_else(|| {
            c.report_dir.map(|d| d.join(format!("{}.{}", c.command.name(), c.format.extension())))
        });
        RunConfig {
            command: c.command,
            level_max: c.level_max,
            degree_max: c.degree_max,
            depth_max: c.depth_max,
            samples: c.samples,
            seed: c.seed,
            backend: c.backend,
            format: c.format,
            phase_order: c.phase_order,
            output,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
    Cap(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Cap(_) => EXIT_CAP,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Cap(m) => write!(f, "resource cap: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [
            ("--level-max", self.level_max as u64),
            ("--degree-max", self.degree_max as u64),
            ("--depth-max", self.depth_max as u64),
            ("--samples", self.samples),
            ("--phase-order", self.phase_order as u64),
        ] {
            if v == 0 {
                return Err(CliError::Usage(format!("{name} must be positive")));
            }
        }
        if self.backend == Backend::Exact && 8 % self.phase_order != 0 {
            return Err(CliError::Usage(format!(
                "the exact backend only represents roots of unity of order dividing 8, got --phase-order {}",
                self.phase_order
            )));
        }
        for (name, v, max) in [
            ("--level-max", self.level_max as u64, HARD_LEVEL as u64),
            ("--degree-max", self.degree_max as u64, HARD_DEGREE as u64),
            ("--depth-max", self.depth_max as u64, HARD_DEPTH as u64),
            ("--samples", self.samples, HARD_SAMPLES),
        ] {
            if v > max {
                return Err(CliError::Cap(format!("{name} {v} exceeds the limit {max}")));
            }
        }
        Ok(())
    }

    fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

fn core_error(suite: &str, e: koopman_core::Error) -> Result<SuiteReport, CliError> {
    match e {
        koopman_core::Error::CapExceeded { .. } | koopman_core::Error::DepthExceeded { .. } => {
            Err(CliError::Cap(format!("{suite}: {e}")))
        }
        e => {
            let mut r = SuiteReport::new(suite, "internal error");
            r.fail("suite aborted".into(), e.to_string(), json!(null));
            Ok(r)
        }
    }
}

/// Runs the selected suites in order.
pub fn run(cfg: &RunConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let mut suites_out = Vec::new();
    let mut timings = BTreeMap::new();
    for c in cfg.command.suites() {
        let start = Instant::now();
        let result = match cfg.backend {
            Backend::Exact => suites::run_suite::<koopman_core::Exact>(c, cfg),
            Backend::Float => suites::run_suite::<num_complex::Complex64>(c, cfg),
        };
        let report = match result {
            Ok(r) => r,
            Err(e) => core_error(c.name(), e)?,
        };
        timings.insert(c.name().to_string(), start.elapsed().as_millis() as u64);
        suites_out.push(report);
    }
    let status = if suites_out.iter().all(SuiteReport::passed) { Status::Pass } else { Status::Fail };
    Ok(RunReport {
        tool: "koopman",
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.echo(),
        status,
        suites: suites_out,
        timings,
    })
}

pub fn render(report: &RunReport, format: Format) -> String {
    match format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    }
}

/// Parses, runs, writes the report, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = RunConfig::from(cli);
    match run(&cfg).and_then(|r| write_report(&cfg, &r).map(|_| r)) {
        Ok(r) if r.passed() => EXIT_OK,
        Ok(_) => EXIT_FAILED,
        Err(e) => {
            eprintln!("koopman: {e}");
            e.exit_code()
        }
    }
}

fn write_report(cfg: &RunConfig, report: &RunReport) -> Result<(), CliError> {
    let body = render(report, cfg.format);
    match &cfg.output {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            }
            std::fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let verdict = if report.passed() { "pass" } else { "fail" };
            println!("{verdict}: report written to {}", path.display());
            Ok(())
        }
        None => std::io::stdout().write_all(body.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}
