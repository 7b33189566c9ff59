//! Command-line front end: argument parsing, dispatch and output.
//!
//! Exit codes: 0 on success, 2 for invalid input or validation failure,
//! 3 for numerical failure (including a failed simulation check).

pub mod commands;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polinflux::{Mode, Scenario};

use commands::SweepVariable;
use output::Report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] polinflux::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Model(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "polinflux",
    version,
    about = "Lobbying equilibria, influence and polarization statics on legislator networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Baseline,
    Affective,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Baseline => Mode::Baseline,
            ModeArg::Affective => Mode::Affective,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariableArg {
    Sigma,
    Alpha,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, value_enum, default_value = "baseline")]
    pub mode: ModeArg,
    /// Write CSV here; the text summary still goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Format used on stdout when no --out is given.
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-legislator influence, party sums and invertibility diagnostics.
    Influence(Common),
    /// Optimal investments, voting probabilities and vote share.
    Equilibrium(Common),
    /// Effect of adding the scenario's added_edges to the network.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Sigma values for the probability rows; defaults to the scenario's sigma.
        #[arg(long, value_delimiter = ',')]
        sigma_grid: Vec<f64>,
    },
    /// Vote share and derivatives over a grid of sigma or alpha.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        variable: Option<VariableArg>,
        /// `start:end`; for alpha, `end` may be `hat` for the grid on [start, alpha_hat).
        #[arg(long)]
        range: Option<String>,
        #[arg(long, default_value_t = 11)]
        steps: usize,
        #[arg(long, value_delimiter = ',')]
        sigma_grid: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        alpha_grid: Vec<f64>,
    },
    /// Monte Carlo check of the equilibrium voting probabilities.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Influence(c) | Command::Equilibrium(c) => c,
            Command::Compare { common, .. }
            | Command::Sweep { common, .. }
            | Command::Simulate { common, .. } => common,
        }
    }
}

fn parse_bound(text: &str) -> Result<f64, CliError> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Invalid(format!("bad range bound {text:?}")))
}

/// Grid points for `--range start:end --steps n`, endpoints included. An
/// `end` of `hat` (alpha only) spaces `n` points on `[start, alpha_hat)`.
pub fn range_grid(range: &str, steps: usize, alpha_hat: Option<f64>) -> Result<Vec<f64>, CliError> {
    let (a, b) = range
        .split_once(':')
        .ok_or_else(|| CliError::Invalid(format!("range {range:?} is not start:end")))?;
    let start = parse_bound(a)?;
    if steps == 0 {
        return Err(CliError::Invalid("--steps must be at least 1".into()));
    }
    if b.trim() == "hat" {
        let hat = alpha_hat
            .ok_or_else(|| CliError::Invalid("`hat` is only valid for alpha ranges".into()))?;
        if start >= hat {
            return Err(CliError::Invalid(format!(
                "range start {start} is not below alpha_hat = {hat}"
            )));
        }
        return Ok((0..steps)
            .map(|k| start + (hat - start) * k as f64 / steps as f64)
            .collect());
    }
    let end = parse_bound(b)?;
    if end < start {
        return Err(CliError::Invalid(format!(
            "range end {end} is below start {start}"
        )));
    }
    if steps == 1 {
        return if start == end {
            Ok(vec![start])
        } else {
            Err(CliError::Invalid("--steps 1 needs start == end".into()))
        };
    }
    Ok((0..steps)
        .map(|k| start + (end - start) * k as f64 / (steps - 1) as f64)
        .collect())
}

fn sweep_grid(
    scenario: &Scenario,
    variable: Option<VariableArg>,
    range: Option<&str>,
    steps: usize,
    sigma_grid: &[f64],
    alpha_grid: &[f64],
) -> Result<(SweepVariable, Vec<f64>), CliError> {
    let variable = match variable {
        Some(v) => v,
        None => match (sigma_grid.is_empty(), alpha_grid.is_empty()) {
            (false, true) => VariableArg::Sigma,
            (true, false) => VariableArg::Alpha,
            _ => {
                return Err(CliError::Invalid(
                    "give --variable, or exactly one of --sigma-grid / --alpha-grid".into(),
                ))
            }
        },
    };
    let (explicit, var) = match variable {
        VariableArg::Sigma => (sigma_grid, SweepVariable::Sigma),
        VariableArg::Alpha => (alpha_grid, SweepVariable::Alpha),
    };
    let grid = match (explicit.is_empty(), range) {
        (false, None) => explicit.to_vec(),
        (true, Some(r)) => {
            let hat = match var {
                SweepVariable::Alpha => Some(commands::scenario_alpha_hat(scenario)?),
                SweepVariable::Sigma => None,
            };
            range_grid(r, steps, hat)?
        }
        (false, Some(_)) => {
            return Err(CliError::Invalid(
                "give either a grid or --range, not both".into(),
            ))
        }
        (true, None) => return Err(CliError::Invalid("sweep needs a grid or --range".into())),
    };
    Ok((var, grid))
}

/// Runs a command and returns its report.
pub fn execute(command: &Command) -> Result<Report, CliError> {
    let common = command.common();
    let scenario = Scenario::load(&common.scenario).map_err(|e| match e {
        polinflux::Error::Parse(msg) => CliError::Invalid(msg),
        other => CliError::Model(other),
    })?;
    let mode = Mode::from(common.mode);
    match command {
        Command::Influence(_) => commands::cmd_influence(&scenario, mode),
        Command::Equilibrium(_) => commands::cmd_equilibrium(&scenario, mode),
        Command::Compare { sigma_grid, .. } => {
            let sigmas = if sigma_grid.is_empty() {
                vec![scenario.params.sigma]
            } else {
                sigma_grid.clone()
            };
            commands::cmd_compare(&scenario, mode, &sigmas)
        }
        Command::Sweep {
            variable,
            range,
            steps,
            sigma_grid,
            alpha_grid,
            ..
        } => {
            let (var, grid) = sweep_grid(
                &scenario,
                *variable,
                range.as_deref(),
                *steps,
                sigma_grid,
                alpha_grid,
            )?;
            commands::cmd_sweep(&scenario, mode, var, &grid)
        }
        Command::Simulate { trials, seed, .. } => {
            commands::cmd_simulate(&scenario, mode, *trials, *seed)
        }
    }
}

/// Runs a command, writes its output and returns the process exit code.
pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let report = execute(&cli.command)?;
    let common = cli.command.common();
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    let mut stdout = std::io::stdout().lock();
    match &common.out {
        Some(path) => {
            std::fs::write(path, report.to_csv())
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            stdout.write_all(report.to_table().as_bytes()).map_err(io)?;
        }
        None => {
            let text = match common.format {
                Format::Csv => report.to_csv(),
                Format::Table => report.to_table(),
            };
            stdout.write_all(text.as_bytes()).map_err(io)?;
        }
    }
    if let Some(msg) = &report.failure {
        eprintln!("error: {msg}");
        return Ok(3);
    }
    Ok(0)
}
