//! `semcom`: command-line driver for keyword-based semantic communication
//! experiments. Every subcommand is a pure function of its input files,
//! flags and seeds; the resolved configuration is logged to stderr.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{PipelineArgs, SourceArgs};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_INFEASIBLE: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            kind: "usage",
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self {
            kind: "input",
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn infeasible(message: impl Into<String>) -> Self {
        Self {
            kind: "infeasible",
            code: EXIT_INFEASIBLE,
            message: message.into(),
        }
    }
}

impl From<semcom_core::Error> for CliError {
    fn from(e: semcom_core::Error) -> Self {
        match e {
            semcom_core::Error::Precondition(_) | semcom_core::Error::NegativeGamma(_) => {
                CliError::usage(e.to_string())
            }
            other => CliError::input(other.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = self.message.replace(['\n', '\r'], " ");
        write!(f, "error kind={} code={} msg={msg:?}", self.kind, self.code)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "semcom",
    version,
    about = "Keyword-based semantic communication simulator"
)]
struct Cli {
    /// Optional TOML file with default values; command-line flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tokenize a corpus and write vocabulary statistics
    Ingest {
        #[command(flatten)]
        source: SourceArgs,
        /// Output CSV: word,count in decreasing frequency
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the language model on the train split and cache transmitter references
    Train {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Vocabulary scheme for the KB used by the references [default: BASE]
        #[arg(long)]
        scheme: Option<String>,
        /// Fraction of the vocabulary added to the KB [default: 0]
        #[arg(long)]
        rho: Option<f64>,
        /// Output directory for lm.txt, xhat.txt and kb.json
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Evaluate one configuration sentence by sentence
    Run {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// BASE, RANDOM or ORDERED [default: ORDERED]
        #[arg(long)]
        scheme: Option<String>,
        /// Fraction of the vocabulary added to the KB [default: 0]
        #[arg(long)]
        rho: Option<f64>,
        /// Send every token with its own symbol
        #[arg(long)]
        full_baseline: bool,
        /// Per-sentence results CSV
        #[arg(long)]
        out: PathBuf,
    },
    /// BLEU-n and average keywords per sentence across a rho grid
    Sweep {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// RANDOM, ORDERED or BOTH [default: BOTH]
        #[arg(long)]
        scheme: Option<String>,
        /// Comma-separated sorted grid [default: 0,0.2,0.4,0.6,0.8,1]
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        rho_grid: Option<Vec<f64>>,
        /// Permutations / noise realizations per point [default: 10]
        #[arg(long)]
        seeds: Option<usize>,
        /// Curve CSV
        #[arg(long)]
        out: PathBuf,
    },
    /// Smallest rho meeting a BLEU floor tau, for each tau
    Optimize {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Comma-separated thresholds [default: 0,0.3,0.5,0.7,0.9]
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        tau: Option<Vec<f64>>,
        /// RANDOM, ORDERED or BOTH [default: BOTH]
        #[arg(long)]
        scheme: Option<String>,
        /// Comma-separated sorted grid [default: 0,0.2,0.4,0.6,0.8,1]
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        rho_grid: Option<Vec<f64>>,
        /// Permutations / noise realizations per point [default: 10]
        #[arg(long)]
        seeds: Option<usize>,
        /// Fraction of sentences that must reach tau [default: 1]
        #[arg(long)]
        satisfaction: Option<f64>,
        /// BLEU order compared with tau [default: 1]
        #[arg(long)]
        bleu_order: Option<usize>,
        /// Optimization CSV
        #[arg(long)]
        out: PathBuf,
    },
    /// Random loss triples: distortion L, bound B and their gap decomposition
    VerifyBound {
        /// Number of random trials [default: 1000]
        #[arg(long)]
        trials: Option<usize>,
        /// Support size of the random distributions [default: 8]
        #[arg(long)]
        support: Option<usize>,
        /// Mutual information weight [default: 0.1]
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
        /// Master seed [default: 0]
        #[arg(long)]
        seed: Option<u64>,
        /// Per-trial CSV
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte-Carlo bit error rate against the closed form
    ChannelTest {
        /// SNR in dB [default: 6]
        #[arg(long, allow_hyphen_values = true)]
        snr_db: Option<f64>,
        /// Number of simulated bits [default: 1000000]
        #[arg(long)]
        bits: Option<u64>,
        /// Noise seed [default: 0]
        #[arg(long)]
        seed: Option<u64>,
        /// Optional one-row summary CSV
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = config::FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest { source, out } => commands::ingest(&source.resolve(&file), &out),
        Command::Train {
            source,
            pipeline,
            scheme,
            rho,
            out_dir,
        } => commands::train(&file, &source, &pipeline, scheme, rho, &out_dir),
        Command::Run {
            source,
            pipeline,
            scheme,
            rho,
            full_baseline,
            out,
        } => commands::run(&file, &source, &pipeline, scheme, rho, full_baseline, &out),
        Command::Sweep {
            source,
            pipeline,
            scheme,
            rho_grid,
            seeds,
            out,
        } => commands::sweep(&file, &source, &pipeline, scheme, rho_grid, seeds, &out),
        Command::Optimize {
            source,
            pipeline,
            tau,
            scheme,
            rho_grid,
            seeds,
            satisfaction,
            bleu_order,
            out,
        } => commands::optimize(
            &file,
            &source,
            &pipeline,
            commands::OptimizeArgs {
                tau,
                scheme,
                rho_grid,
                seeds,
                satisfaction,
                bleu_order,
            },
            &out,
        ),
        Command::VerifyBound {
            trials,
            support,
            gamma,
            seed,
            out,
        } => commands::verify_bound(&file, trials, support, gamma, seed, &out),
        Command::ChannelTest {
            snr_db,
            bits,
            seed,
            out,
        } => commands::channel_test(&file, snr_db, bits, seed, out.as_deref()),
    }
}
