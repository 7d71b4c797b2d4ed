//! `cograte` — compute and validate secondary-user power profiles and rates
//! for a channel shared with a sporadic primary transmitter.

mod commands;
mod emit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Transmission schemes, ordered by how much the secondary knows about the
/// primary's activity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    /// Clairvoyant bound: the state of every slot is known in advance.
    Genie,
    /// Slot 0 spent sensing the starting state, observed without error.
    Perfect,
    /// Slot 0 spent sensing, observed through a miss/false-alarm channel.
    Noisy,
    /// No sensing at all: one static superposition split.
    Nosense,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Genie => "genie",
            Scheme::Perfect => "perfect",
            Scheme::Noisy => "noisy",
            Scheme::Nosense => "nosense",
        }
    }
}

/// Variables a sweep can traverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variable {
    /// Interference margin left by the primary (`INR_gap`).
    #[value(name = "inr_gap")]
    InrGap,
    /// Received primary interference power at the secondary (`INR_2`),
    /// applied by re-deriving the cross gain `h12_sq = INR_2 / SNR_1`.
    Inr2,
    /// Block length (slots per block after the sensing slot).
    #[value(name = "T")]
    T,
    /// Long-run on-fraction of the primary (genie and R1 only).
    Beta,
    /// Sensing miss probability.
    #[value(name = "p_m")]
    PM,
    /// Sensing false-alarm probability.
    #[value(name = "p_f")]
    PF,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::InrGap => "inr_gap",
            Variable::Inr2 => "inr2",
            Variable::T => "T",
            Variable::Beta => "beta",
            Variable::PM => "p_m",
            Variable::PF => "p_f",
        }
    }
}

/// Validation suite sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    /// 20 random instances per oracle check.
    Quick,
    /// 1000 instances for the grid oracles, 100 for the gradient oracle
    /// (the projected-gradient solves dominate the runtime budget).
    Full,
}

#[derive(Parser)]
#[command(
    name = "cograte",
    version,
    about = "Optimal secondary-user power profiles and rates alongside a sporadic primary"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scheme on a scenario; print a JSON report, optionally
    /// export the power profile as CSV.
    Solve {
        /// Scenario JSON file.
        #[arg(long)]
        scenario: PathBuf,
        /// Scheme to solve.
        #[arg(long)]
        scheme: Scheme,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the power profile CSV (sensed_state, slot, rho_n, rho_s).
        #[arg(long)]
        profile_out: Option<PathBuf>,
    },
    /// Sweep one variable and emit a CSV with one rate column per scheme
    /// plus the primary rate R1.
    Sweep {
        /// Scenario JSON file (baseline values for everything not swept).
        #[arg(long)]
        scenario: PathBuf,
        /// Variable to sweep.
        #[arg(long)]
        variable: Variable,
        /// Left end of the sweep range.
        #[arg(long)]
        start: f64,
        /// Right end of the sweep range.
        #[arg(long)]
        stop: f64,
        /// Number of grid points (>= 2).
        #[arg(long)]
        points: usize,
        /// Comma-separated schemes to evaluate.
        #[arg(long, value_delimiter = ',')]
        schemes: Vec<Scheme>,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify the operating region over an (INR_gap, INR2) grid and emit
    /// a CSV map.
    Regions {
        #[arg(long, default_value_t = 7.0)]
        snr1: f64,
        #[arg(long, default_value_t = 7.0)]
        snr2: f64,
        #[arg(long, default_value_t = 0.05)]
        gap_start: f64,
        #[arg(long, default_value_t = 50.0)]
        gap_stop: f64,
        #[arg(long, default_value_t = 50)]
        gap_points: usize,
        #[arg(long, default_value_t = 0.0)]
        inr2_start: f64,
        #[arg(long, default_value_t = 60.0)]
        inr2_stop: f64,
        #[arg(long, default_value_t = 50)]
        inr2_points: usize,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a scheme, then check it against a Monte Carlo run: rate CI,
    /// occupancy statistics, and the primary-protection audit.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        /// Scheme to simulate (genie is not simulable: it is defined by
        /// clairvoyant knowledge the sampler does not model).
        #[arg(long)]
        scheme: Scheme,
        /// Number of Monte Carlo blocks.
        #[arg(long, default_value_t = 100_000)]
        blocks: usize,
        /// RNG seed (block b uses ChaCha8 substream (seed, b)).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON summary here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional block-trace CSV (block, s0, tau, sensed).
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Run the oracle-equivalence and invariant suites on random instances.
    Validate {
        #[arg(long, default_value = "quick")]
        level: Level,
        /// Base RNG seed for instance generation.
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { scenario, scheme, out, profile_out } => {
            commands::cmd_solve(&scenario, scheme, out.as_deref(), profile_out.as_deref())
        }
        Command::Sweep { scenario, variable, start, stop, points, schemes, out } => {
            commands::cmd_sweep(&scenario, variable, start, stop, points, &schemes, out.as_deref())
        }
        Command::Regions {
            snr1,
            snr2,
            gap_start,
            gap_stop,
            gap_points,
            inr2_start,
            inr2_stop,
            inr2_points,
            out,
        } => commands::cmd_regions(
            snr1,
            snr2,
            (gap_start, gap_stop, gap_points),
            (inr2_start, inr2_stop, inr2_points),
            out.as_deref(),
        ),
        Command::Simulate { scenario, scheme, blocks, seed, out, trace_out } => {
            commands::cmd_simulate(
                &scenario,
                scheme,
                blocks,
                seed,
                out.as_deref(),
                trace_out.as_deref(),
            )
        }
        Command::Validate { level, seed } => commands::cmd_validate(level, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
