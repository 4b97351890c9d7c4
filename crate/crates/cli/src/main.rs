use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use phaselaw_cli::commands::{self, CommandKind, Fault};
use phaselaw_cli::output::ManifestInputs;
use phaselaw_cli::{parse_seeds, CliError, ExperimentConfig};

/// Exponential-phase random matrices: spectral experiments and exact checks.
///
/// Exit status: 0 ok, 1 usage or validation error, 2 infrastructure
/// failure, 3 failed exact invariant (verify only).
#[derive(Parser, Debug)]
#[command(name = "phaselaw", version)]
struct Cli {
    /// TOML experiment configuration; defaults apply when omitted.
    #[arg(long, global = true, env = "PHASELAW_CONFIG")]
    config: Option<PathBuf>,
    /// Output directory; created by the run and never overwritten without --force.
    #[arg(long, global = true, env = "PHASELAW_OUT")]
    out: Option<PathBuf>,
    /// Seeds, e.g. "1,2,10..20" (ranges are half-open).
    #[arg(long, global = true, env = "PHASELAW_SEEDS")]
    seeds: Option<String>,
    /// Worker threads for independent draws; 0 uses every core.
    #[arg(long, global = true, env = "PHASELAW_PARALLEL")]
    parallel: Option<usize>,
    /// Write into an existing output directory.
    #[arg(long, global = true)]
    force: bool,
    #[arg(long, global = true, hide = true, value_parser = ["ward"])]
    inject_fault: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Eigenvalues, counting function and Stieltjes transform per seed.
    Spectrum,
    /// |m_N − m_MP| over a spectral grid or lattice, with optional descent in η.
    Locallaw,
    /// Counting function against the Marchenko–Pastur distribution function.
    Rigidity,
    /// Sup-norms of bulk eigenvectors.
    Deloc,
    /// Monte-Carlo moments of the fluctuation term and the partial expectation.
    Moments,
    /// Solution sets of the Vinogradov-type system, counts and strata.
    Dio,
    /// Exact parameter and exponent arithmetic over a range of d.
    Exponents,
    /// Exact-identity suite; exits 3 when any check fails.
    Verify,
}

impl Command {
    fn kind(self) -> CommandKind {
        match self {
            Command::Spectrum => CommandKind::Spectrum,
            Command::Locallaw => CommandKind::Locallaw,
            Command::Rigidity => CommandKind::Rigidity,
            Command::Deloc => CommandKind::Deloc,
            Command::Moments => CommandKind::Moments,
            Command::Dio => CommandKind::Dio,
            Command::Exponents => CommandKind::Exponents,
            Command::Verify => CommandKind::Verify,
        }
    }
}

fn effective_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &cli.out {
        config.out = Some(out.clone());
    }
    if let Some(s) = &cli.seeds {
        config.seeds = parse_seeds(s)?;
    }
    if let Some(p) = cli.parallel {
        config.parallel = p;
    }
    config.apply_env()?;
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let kind = cli.command.kind();
    let config = effective_config(&cli)?;
    let out = config.out.clone();
    match &out {
        None if kind != CommandKind::Verify => return Err(CliError::Usage("--out is required".into())),
        Some(dir) if dir.exists() && !cli.force => {
            return Err(CliError::Usage(format!("{} already exists; pass --force to overwrite", dir.display())));
        }
        _ => {}
    }
    let fault = cli.inject_fault.as_deref().map(|_| Fault::Ward);

    phaselaw::pin_linear_algebra_to_one_thread();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallel)
        .build()
        .map_err(|e| CliError::Infra(format!("thread pool: {e}")))?;
    let result = pool.install(|| commands::run(kind, &config, fault))?;

    for line in &result.report {
        println!("{line}");
    }
    if let Some(dir) = &out {
        // neither the output location nor the thread count affects results
        let recorded = ExperimentConfig { out: None, parallel: 0, ..config.clone() };
        let mut outputs = result.outputs;
        outputs.bytes("config.toml", recorded.to_toml().into_bytes());
        let json = recorded.canonical_json();
        let manifest = outputs.commit(dir, cli.force, ManifestInputs { command: kind.name(), config_json: &json })?;
        println!("wrote {} files to {}", manifest.outputs.len() + 1, dir.display());
    }
    match result.failure {
        Some(msg) => Err(CliError::Invariant(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
