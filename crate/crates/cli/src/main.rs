//! `nvespin`: simulations and fits for pulsed ESR of NV⁻ centers.

mod commands;
mod config;
mod error;
mod output;
mod presets;
mod samples;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Context;
use config::{DataTarget, Overrides};
use error::{CliError, CliResult};
use output::OutputDir;

#[derive(Parser)]
#[command(
    name = "nvespin",
    version,
    about = "Spin simulations and fits for pulsed ESR of NV⁻ centers in diamond"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; defaults are used when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for outputs.
    #[arg(long, global = true, value_name = "DIR", default_value = "nvespin-out")]
    out: PathBuf,
    /// Seed for Monte Carlo averaging; overrides the config (default 0).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Report progress on stderr.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Stick and broadened field-swept ESR spectra of the four NV sites.
    SimulateSpectrum,
    /// ESEEM trace, cosine FT and peak list for one site and transition.
    SimulateEseem,
    /// Fit a model to measured data.
    Fit {
        #[command(subcommand)]
        kind: FitKind,
    },
    /// Modulation depth as a function of field strength.
    ScanCancellation,
    /// Sample registry tools.
    Samples {
        #[command(subcommand)]
        action: SamplesAction,
    },
}

#[derive(Subcommand)]
enum FitKind {
    /// Field orientation from assigned resonance fields.
    Orientation {
        #[arg(long, value_name = "PATH")]
        data: Option<PathBuf>,
    },
    /// Stretched-exponential echo decay.
    Decay {
        #[arg(long, value_name = "PATH")]
        data: Option<PathBuf>,
    },
    /// Nitrogen hyperfine and quadrupole couplings from ESEEM frequencies.
    Couplings,
    /// Thermally activated fluctuator model of T₂ against temperature.
    T2Temperature {
        #[arg(long, value_name = "PATH")]
        data: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SamplesAction {
    /// Check a registry CSV, listing every problem found.
    Validate {
        /// Registry to check; the configured or bundled registry otherwise.
        registry: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> CliResult<String> {
    let c = &cli.common;
    if let Some(n) = c.threads {
        if n == 0 {
            return Err(CliError::config("--threads: must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("--threads: {e}")))?;
    }
    let data = match &cli.command {
        Command::Fit {
            kind: FitKind::Decay { data: Some(p) },
        } => Some((DataTarget::Decay, p.clone())),
        Command::Fit {
            kind: FitKind::Orientation { data: Some(p) },
        } => Some((DataTarget::Orientation, p.clone())),
        Command::Fit {
            kind: FitKind::T2Temperature { data: Some(p) },
        } => Some((DataTarget::T2Temperature, p.clone())),
        _ => None,
    };
    let (raw, base) = config::load(c.config.as_deref())?;
    let resolved = config::resolve(raw, &base, &Overrides { seed: c.seed, data })?;
    if c.verbose {
        eprintln!("spin system: {}", resolved.system_origin);
    }
    let ctx = Context {
        resolved,
        out: OutputDir::create(&c.out, c.verbose)?,
        verbose: c.verbose,
    };
    match &cli.command {
        Command::SimulateSpectrum => commands::spectrum::run(&ctx),
        Command::SimulateEseem => commands::eseem::run(&ctx),
        Command::ScanCancellation => commands::scan::run(&ctx),
        Command::Fit { kind } => match kind {
            FitKind::Orientation { .. } => commands::fit::orientation(&ctx),
            FitKind::Decay { .. } => commands::fit::decay(&ctx),
            FitKind::Couplings => commands::fit::couplings(&ctx),
            FitKind::T2Temperature { .. } => commands::fit::t2_temperature(&ctx),
        },
        Command::Samples {
            action: SamplesAction::Validate { registry },
        } => commands::samples::validate(&ctx, registry.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("nvespin: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
