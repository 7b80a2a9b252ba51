//! File formats, workspace loading and the command implementations behind
//! the `mcflow` binary.

pub mod commands;
pub mod io;
pub mod parallel;
pub mod workspace;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use mcflow_core::complex::TelescopeMode;
use mcflow_core::Rational;

use crate::commands::{Outcome, Settings};
use crate::workspace::CliError;

#[derive(Parser, Debug)]
#[command(name = "mcflow", version, about = "Exact L-infinity, Maurer-Cartan and Floer-model computations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Truncation order: work modulo Q_{>=K}.
    #[arg(long = "K", global = true, default_value_t = 4)]
    pub k: i64,
    /// Highest tau power kept in the flow (defaults to K).
    #[arg(long = "T", global = true)]
    pub t: Option<usize>,
    /// Arity bound for relation checks and deformations.
    #[arg(long, global = true)]
    pub max_arity: Option<usize>,
    /// Truncation or filtration threshold, written `a/b` or `a`.
    #[arg(long, global = true, value_parser = parse_rational_flag)]
    pub p: Option<Rational>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for relation sampling past the exhaustive limit.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = ModeFlag::Truncated)]
    pub mode: ModeFlag,
    /// Levels n scanned by `orbits`, comma separated.
    #[arg(long, global = true, value_delimiter = ',', default_value = "1,2,3")]
    pub levels: Vec<u32>,
    /// Lower bound for C_n used by the slope admissibility test.
    #[arg(long, global = true, value_parser = parse_rational_flag, default_value = "0")]
    pub cn_bound: Rational,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Run every load-time check.
    Validate { files: Vec<PathBuf> },
    /// Curvature of beta (or of the tautological element).
    Curvature { files: Vec<PathBuf> },
    /// Structure constants twisted by beta.
    Deform { files: Vec<PathBuf> },
    /// The divisor gauge flow and its checks.
    Flow { files: Vec<PathBuf> },
    /// Telescope of a directed system.
    Telescope { files: Vec<PathBuf> },
    /// Cohomology ranks of a complex.
    Cohomology { files: Vec<PathBuf> },
    /// The full comparison pipeline.
    Compare { files: Vec<PathBuf> },
    /// Orbit families of the radial model.
    Orbits { files: Vec<PathBuf> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeFlag {
    Truncated,
    Literal,
}

fn parse_rational_flag(s: &str) -> Result<Rational, String> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: num_bigint::BigInt = n.trim().parse().map_err(|_| format!("`{s}` is not a rational"))?;
    let d: num_bigint::BigInt = d.trim().parse().map_err(|_| format!("`{s}` is not a rational"))?;
    if d <= 0.into() {
        return Err(format!("`{s}` needs a positive denominator"));
    }
    Ok(Rational::new(n, d))
}

impl Cli {
    fn settings(&self) -> Settings {
        Settings {
            k: self.k,
            t: self.t,
            max_arity: self.max_arity,
            p: self.p.clone(),
            seed: self.seed,
            mode: match self.mode {
                ModeFlag::Truncated => TelescopeMode::Truncated,
                ModeFlag::Literal => TelescopeMode::Literal,
            },
            levels: self.levels.clone(),
            cn_bound: self.cn_bound.clone(),
        }
    }
}

type Handler = fn(&workspace::Workspace, &Settings) -> Result<Outcome, CliError>;

/// Load the inputs and run one command.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    if cli.k < 1 {
        return Err(CliError::input("--K must be at least 1"));
    }
    let s = cli.settings();
    let (files, f): (&[PathBuf], Handler) = match &cli.command {
        Command::Validate { files } => (files, commands::validate),
        Command::Curvature { files } => (files, commands::curvature_cmd),
        Command::Deform { files } => (files, commands::deform_cmd),
        Command::Flow { files } => (files, commands::flow),
        Command::Telescope { files } => (files, commands::telescope_cmd),
        Command::Cohomology { files } => (files, commands::cohomology),
        Command::Compare { files } => (files, commands::compare),
        Command::Orbits { files } => (files, commands::orbits),
    };
    let ws = workspace::load(files)?;
    f(&ws, &s)
}

/// What the process prints and returns.
pub struct Rendered {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Rendered
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Rendered { code, stdout: text, stderr: String::new() }
            } else {
                Rendered { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let stdout = match cli.format {
                Format::Text => out.text,
                Format::Json => serde_json::to_string_pretty(&out.json).expect("reports serialize") + "\n",
            };
            let stderr = out.diagnostic.map(|d| format!("error: {d}\n")).unwrap_or_default();
            Rendered { code: out.code, stdout, stderr }
        }
        Err(e) => Rendered { code: e.code, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}
