//! Command-line front end: reads a TOML run config, runs one verification or decider and
//! writes a JSON report plus an optional CSV table.
//!
//! Exit codes: 0 pass, 1 fail, 2 inconclusive, 3 config or I/O error.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

pub use commands::{exit_code, Command, Outcome};
pub use config::{Loaded, RunConfig};
pub use error::{CliError, CliResult};

pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "jacobi-lab", version, about = "Jacobi, Poisson and contact structure diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    global: Global,
}

#[derive(Debug, Args)]
struct Global {
    /// Run configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Report path; overrides `output.report`.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Leave the timestamp out of the report.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Cmd {
    /// Schouten and Jacobiator checks of a Jacobi structure.
    VerifyJacobi,
    /// Homogeneous Poisson structure on M × ℝ and the round trip back.
    Poissonize,
    /// Poisson and Jacobi integrability of the M_a family.
    DiagnoseMa,
    /// A-path integration, cocycle integral, translation and homotopy transport.
    Apath,
    /// Groupoid axioms and multiplicativity identities.
    GroupoidCheck,
    /// Discreteness and prequantizability of period groups.
    PeriodsCheck,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Command {
        match c {
            Cmd::VerifyJacobi => Command::VerifyJacobi,
            Cmd::Poissonize => Command::Poissonize,
            Cmd::DiagnoseMa => Command::DiagnoseMa,
            Cmd::Apath => Command::Apath,
            Cmd::GroupoidCheck => Command::GroupoidCheck,
            Cmd::PeriodsCheck => Command::PeriodsCheck,
        }
    }
}

fn execute(cli: &Cli) -> CliResult<i32> {
    let cmd = Command::from(cli.command);
    let g = &cli.global;
    let path = g.config.as_ref().ok_or_else(|| CliError::config("--config PATH is required"))?;
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    let loaded = Loaded::parse(&text)?;
    if let Some(c) = &loaded.config.command {
        if c != cmd.name() {
            return Err(CliError::config(format!("config is for `{c}`, not `{}`", cmd.name())));
        }
    }
    let mut s = loaded.config.settings;
    s.tol = g.tol.unwrap_or(s.tol);
    s.seed = g.seed.unwrap_or(s.seed);
    s.samples = g.samples.unwrap_or(s.samples);
    if !(s.tol > 0.0) || s.samples == 0 {
        return Err(CliError::config("tol must be positive and samples at least 1"));
    }
    let mut out = commands::run(cmd, &loaded, s.verify_options())?;
    if !g.no_timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        out.report.provenance.timestamp = Some(format!("unix:{secs}"));
    }
    if let (Some(t), Some(p)) = (&out.table, &loaded.config.output.csv) {
        output::write_file(p, &t.to_csv())?;
    }
    output::emit_report(&out.report, g.out.as_ref().or(loaded.config.output.report.as_ref()))?;
    let code = exit_code(out.report.outcome);
    eprintln!("{}: {:?} (exit {code})", cmd.name(), out.report.outcome);
    Ok(code)
}

/// Parses arguments and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("jacobi-lab: {e}");
            EXIT_CONFIG
        }
    }
}
