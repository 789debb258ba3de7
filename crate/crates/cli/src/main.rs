//! `senselaw`: analyze embedding corpora for frequency-polysemy and
//! frequency-specificity structure.
//!
//! Exit codes: 0 success, 2 invalid arguments or configuration, 3 unreadable
//! or malformed input and failed writes.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use senselaw::{AnalysisConfig, PhaseThresholds, SynthSpec};

mod commands;

const EXIT_VALIDATION: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "senselaw", version, about = "Sense induction and lexical-law statistics over embedding corpora")]
struct Cli {
    /// Worker threads (default: available parallelism). Outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze one checkpoint corpus and write its summary report.
    Analyze(AnalyzeArgs),
    /// Analyze every corpus in a directory and classify the trajectory.
    Trajectory(TrajectoryArgs),
    /// Re-run the analysis over a range of DBSCAN radii.
    Sweep(SweepArgs),
    /// Generate a synthetic corpus with known sense structure.
    Synth(SynthArgs),
    /// Write the four per-step panel CSVs from a trajectory report.
    Export(ExportArgs),
}

/// Analysis settings shared by every analyzing subcommand, except the radius.
#[derive(Args, Debug, Clone)]
struct SelectionArgs {
    #[arg(long, default_value_t = 2)]
    min_samples: usize,
    #[arg(long = "min-freq", default_value_t = 5)]
    min_frequency: usize,
    #[arg(long, default_value_t = 500)]
    top_k: usize,
    #[arg(long, default_value_t = 3)]
    min_token_len: usize,
    #[arg(long, default_value_t = 1e-6)]
    specificity_floor: f64,
}

impl SelectionArgs {
    fn config(&self, eps: f64) -> AnalysisConfig {
        AnalysisConfig {
            eps,
            min_samples: self.min_samples,
            min_frequency: self.min_frequency,
            top_k: self.top_k,
            min_token_len: self.min_token_len,
            specificity_floor: self.specificity_floor,
            ..AnalysisConfig::default()
        }
    }
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// LEXL corpus, or JSON Lines when the name ends in `.jsonl`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 0.3)]
    eps: f64,
    #[command(flatten)]
    selection: SelectionArgs,
    /// Also write word,frequency,polysemy,variance,specificity rows here.
    #[arg(long)]
    per_word_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrajectoryArgs {
    /// Directory of `.lexl` (or `.jsonl`) corpora, one per checkpoint.
    #[arg(long)]
    inputs: PathBuf,
    /// Report path; panel CSVs are written beside it as `<stem>.<panel>.csv`.
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 0.3)]
    eps: f64,
    #[command(flatten)]
    selection: SelectionArgs,
    #[arg(long, default_value_t = 0.2)]
    emergence_threshold: f64,
    #[arg(long, default_value_t = 0.2)]
    collapse_threshold: f64,
    #[arg(long, default_value_t = 0.5)]
    graceful_fraction: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    input: PathBuf,
    /// `start:stop:step` (stop inclusive) or a single radius.
    #[arg(long, default_value = "0.2:0.5:0.05")]
    eps: String,
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    selection: SelectionArgs,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long = "vocab", default_value_t = 2000)]
    vocab_size: usize,
    #[arg(long, default_value_t = 1.0)]
    zipf_s: f64,
    #[arg(long, default_value_t = 0.6)]
    beta: f64,
    /// `c` in K = max(1, round(c * f^beta)).
    #[arg(long, default_value_t = 0.2)]
    poly_coeff: f64,
    #[arg(long, default_value_t = 16)]
    dim: usize,
    #[arg(long = "sigma", default_value_t = 0.05)]
    noise_sigma: f64,
    /// Per-word noise grows as sigma * f^gamma.
    #[arg(long = "gamma", default_value_t = 0.0)]
    sigma_freq_exponent: f64,
    #[arg(long = "tokens", default_value_t = 60_000)]
    total_tokens: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Minimum cosine distance between a word's sense centroids.
    #[arg(long = "separation", default_value_t = 0.7)]
    min_centroid_distance: f64,
    /// Probability of drawing a word's sense count from another word's frequency.
    #[arg(long = "decoupling", default_value_t = 0.0)]
    polysemy_decoupling: f64,
    /// Checkpoint step recorded in the file header.
    #[arg(long = "step", default_value_t = 0)]
    checkpoint_step: u64,
    #[arg(long, default_value_t = 512)]
    doc_len: usize,
    #[arg(long)]
    output: PathBuf,
    /// Also write the per-word ground truth as JSON.
    #[arg(long)]
    ground_truth: Option<PathBuf>,
}

impl SynthArgs {
    fn spec(&self) -> SynthSpec {
        SynthSpec {
            vocab_size: self.vocab_size,
            zipf_s: self.zipf_s,
            beta: self.beta,
            poly_coeff: self.poly_coeff,
            dim: self.dim,
            noise_sigma: self.noise_sigma,
            sigma_freq_exponent: self.sigma_freq_exponent,
            total_tokens: self.total_tokens,
            seed: self.seed,
            min_centroid_distance: self.min_centroid_distance,
            polysemy_decoupling: self.polysemy_decoupling,
            checkpoint_step: self.checkpoint_step,
            doc_len: self.doc_len,
        }
    }
}

#[derive(Args, Debug)]
struct ExportArgs {
    /// Trajectory report JSON.
    #[arg(long)]
    input: PathBuf,
    /// Output prefix; writes `<prefix>.<panel>.csv`.
    #[arg(long)]
    output: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    let threads = match cli.threads {
        Some(0) => {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_VALIDATION);
        }
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: could not start worker threads: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };

    let result = pool.install(|| match cli.command {
        Command::Analyze(args) => commands::analyze(&args),
        Command::Trajectory(args) => commands::trajectory(&args),
        Command::Sweep(args) => commands::sweep(&args),
        Command::Synth(args) => commands::synth(&args),
        Command::Export(args) => commands::export(&args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { EXIT_INPUT } else { EXIT_VALIDATION })
        }
    }
}

impl TrajectoryArgs {
    fn thresholds(&self) -> PhaseThresholds {
        PhaseThresholds {
            emergence: self.emergence_threshold,
            collapse_rho: self.collapse_threshold,
            graceful_fraction: self.graceful_fraction,
        }
    }
}
