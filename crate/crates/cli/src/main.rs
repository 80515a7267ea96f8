//! `ensembleq`: command-line access to ensemble quantumness measures.

mod commands;
mod failure;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ensembleq_core::densmat::FidelityConvention;
use ensembleq_core::extopt::OptimizerConfig;
use ensembleq_core::par::Execution;
use ensembleq_core::recovery::DEFAULT_AU_GRID;

use commands::SweepGrid;
use failure::Failure;
use output::Format;

#[derive(Parser)]
#[command(name = "ensembleq", version, about = "Quantumness of quantum-state ensembles")]
struct Cli {
    /// Seed for every randomized restart.
    #[arg(long, global = true, env = "ENSEMBLEQ_SEED", default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Convention::Squared)]
    fidelity_convention: Convention,
    /// Output format; the sweep defaults to CSV, everything else to JSON.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write here (atomically) instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(flatten)]
    opt: OptimizerFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Squared,
    Root,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Parallel,
    Sequential,
}

#[derive(Args)]
struct OptimizerFlags {
    /// Extension-optimizer restarts.
    #[arg(long, global = true)]
    restarts: Option<usize>,
    #[arg(long, global = true)]
    max_iters: Option<usize>,
    /// POVM-search restarts.
    #[arg(long, global = true)]
    povm_restarts: Option<usize>,
    #[arg(long, global = true, value_enum)]
    execution: Option<Mode>,
}

#[derive(Args)]
struct EnsembleInput {
    /// Ensemble JSON file.
    #[arg(long, short)]
    input: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Holevo quantity of an ensemble.
    Holevo(EnsembleInput),
    /// n-copy Holevo gap over broadcast extensions.
    ChiQ {
        #[command(flatten)]
        input: EnsembleInput,
        #[arg(long, short, default_value_t = 2)]
        n: usize,
    },
    /// n-copy fidelity gap of a two-state ensemble.
    FidelityQ {
        #[command(flatten)]
        input: EnsembleInput,
        #[arg(long, short, default_value_t = 2)]
        n: usize,
    },
    /// Table over the one-parameter two-qubit example.
    SweepExample {
        #[arg(long, default_value_t = 0.0)]
        a_min: f64,
        #[arg(long, default_value_t = 0.5)]
        a_max: f64,
        /// Number of grid points, endpoints included.
        #[arg(long, default_value_t = 11)]
        steps: usize,
        #[arg(long, default_value_t = DEFAULT_AU_GRID)]
        au_grid: usize,
    },
    /// Accessible information by POVM search.
    AccInfo(EnsembleInput),
    /// Holevo quantity minus accessible information.
    Fuchs(EnsembleInput),
    /// Infinite-copy identities of a pure-state ensemble.
    PureLimits(EnsembleInput),
    /// Builds the Petz recovery map and reports how well it undoes the channel.
    PetzCheck {
        /// Reference state (matrix JSON).
        #[arg(long)]
        reference: PathBuf,
        /// Channel JSON.
        #[arg(long)]
        channel: PathBuf,
        /// Optional ensemble whose members are also pushed through and recovered.
        #[arg(long)]
        members: Option<PathBuf>,
    },
    /// Trace-norm test for mapping one qubit pair onto another by a channel.
    AuCheck {
        /// Use the built-in example at this parameter.
        #[arg(long)]
        example: Option<f64>,
        /// JSON with rho1, rho2, sigma1, sigma2.
        #[arg(long)]
        states: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_AU_GRID)]
        grid: usize,
    },
}

impl Cli {
    fn config(&self) -> OptimizerConfig {
        let mut cfg = OptimizerConfig {
            seed: self.seed,
            ..OptimizerConfig::default()
        };
        if let Some(r) = self.opt.restarts {
            cfg.restarts = r;
        }
        if let Some(m) = self.opt.max_iters {
            cfg.max_iters = m;
        }
        if let Some(p) = self.opt.povm_restarts {
            cfg.povm_restarts = p;
        }
        if let Some(mode) = self.opt.execution {
            cfg.execution = match mode {
                Mode::Parallel => Execution::Parallel,
                Mode::Sequential => Execution::Sequential,
            };
        }
        cfg
    }

    fn convention(&self) -> FidelityConvention {
        match self.fidelity_convention {
            Convention::Squared => FidelityConvention::Squared,
            Convention::Root => FidelityConvention::Root,
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = cli.config();
    cfg.validate()?;
    let conv = cli.convention();
    let mut default_format = Format::Json;
    let value = match &cli.command {
        Command::Holevo(i) => commands::holevo_cmd(&commands::load_ensemble(&i.input)?)?,
        Command::ChiQ { input, n } => commands::chi_q_cmd(&commands::load_ensemble(&input.input)?, *n, &cfg)?,
        Command::FidelityQ { input, n } => {
            commands::fidelity_q_cmd(&commands::load_ensemble(&input.input)?, *n, &cfg, conv)?
        }
        Command::SweepExample {
            a_min,
            a_max,
            steps,
            au_grid,
        } => {
            default_format = Format::Csv;
            let grid = SweepGrid {
                a_min: *a_min,
                a_max: *a_max,
                steps: *steps,
                au_grid: *au_grid,
            };
            commands::sweep_cmd(&grid, &cfg, conv)?
        }
        Command::AccInfo(i) => commands::acc_info_cmd(&commands::load_ensemble(&i.input)?, &cfg)?,
        Command::Fuchs(i) => commands::fuchs_cmd(&commands::load_ensemble(&i.input)?, &cfg)?,
        Command::PureLimits(i) => commands::pure_limits_cmd(&commands::load_ensemble(&i.input)?, &cfg)?,
        Command::PetzCheck {
            reference,
            channel,
            members,
        } => commands::petz_check_cmd(reference, channel, members.as_deref())?,
        Command::AuCheck { example, states, grid } => commands::au_check_cmd(*example, states.as_deref(), *grid)?,
    };
    let text = output::render(&value, cli.format.unwrap_or(default_format))?;
    output::emit(&text, cli.output.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
