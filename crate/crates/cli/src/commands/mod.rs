//! One module per subcommand. Commands compute everything in memory and
//! return the files to write; only `verify` can report a failed invariant.

mod dio;
mod exponents;
mod moments;
mod scans;
mod spectrum;
mod verify;

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::Outputs;

pub use verify::{CheckResult, VerifyReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Spectrum,
    Locallaw,
    Rigidity,
    Deloc,
    Moments,
    Dio,
    Exponents,
    Verify,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Spectrum => "spectrum",
            CommandKind::Locallaw => "locallaw",
            CommandKind::Rigidity => "rigidity",
            CommandKind::Deloc => "deloc",
            CommandKind::Moments => "moments",
            CommandKind::Dio => "dio",
            CommandKind::Exponents => "exponents",
            CommandKind::Verify => "verify",
        }
    }
}

/// Deliberate corruption used to check that `verify` can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    Ward,
}

pub struct CommandOutput {
    pub outputs: Outputs,
    /// Human-readable lines for stdout.
    pub report: Vec<String>,
    /// Set when an exact invariant failed.
    pub failure: Option<String>,
}

impl CommandOutput {
    fn files(outputs: Outputs) -> Self {
        Self { outputs, report: Vec::new(), failure: None }
    }
}

pub fn run(kind: CommandKind, config: &ExperimentConfig, fault: Option<Fault>) -> Result<CommandOutput, CliError> {
    match kind {
        CommandKind::Spectrum => spectrum::run(config).map(CommandOutput::files),
        CommandKind::Locallaw => scans::locallaw(config).map(CommandOutput::files),
        CommandKind::Rigidity => scans::rigidity(config).map(CommandOutput::files),
        CommandKind::Deloc => scans::deloc(config).map(CommandOutput::files),
        CommandKind::Moments => moments::run(config).map(CommandOutput::files),
        CommandKind::Dio => dio::run(config).map(CommandOutput::files),
        CommandKind::Exponents => exponents::run(config).map(CommandOutput::files),
        CommandKind::Verify => verify::run(config, fault),
    }
}

/// Per-seed work on the current pool, results in seed order.
fn per_seed<T, F>(seeds: &[u64], f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(u64) -> Result<T, CliError> + Sync,
{
    seeds.par_iter().map(|&s| f(s)).collect()
}

/// `θ₀(d)` when positive, else zero.
fn default_theta0(d: usize) -> f64 {
    u32::try_from(d)
        .ok()
        .and_then(|d| phaselaw::locallaw::theta_params(d).ok())
        .map(|t| t.theta0_f64().max(0.0))
        .unwrap_or(0.0)
}
