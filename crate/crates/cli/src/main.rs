mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coherentnn::cnet::ActivationKind;
use coherentnn::Error;

/// Complex-valued network training and photonic compilation experiments.
#[derive(Debug, Parser)]
#[command(name = "coherentnn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train the two-sample phase-rotation XOR gate.
    TrainPhaseXor {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Train the one-hot XOR intensity mapping once per init scheme.
    TrainRealXor {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Learn a diffraction operator and check the modulation round trip.
    TrainDiffractive {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        train: TrainArgs,
        /// Samples per field.
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Training samples.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        /// Held-out samples for the round trip.
        #[arg(long, default_value_t = 200)]
        test: usize,
        /// amplitude, phase, amplitude_phase or mixed.
        #[arg(long, default_value = "mixed")]
        kind: String,
    },
    /// Train an MNIST classifier once per init scheme.
    TrainMnist {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long)]
        mnist_images: PathBuf,
        #[arg(long)]
        mnist_labels: PathBuf,
        /// Number of leading samples to train on.
        #[arg(long, default_value_t = 1000)]
        limit: usize,
    },
    /// Compare analytic gradients against finite differences on random nets.
    Gradcheck {
        #[command(flatten)]
        common: Common,
        /// Random nets per activation.
        #[arg(long, default_value_t = 20)]
        nets: usize,
        #[arg(long, default_value_t = 1e-6)]
        h: f64,
        /// Negate the analytic gradient (negative control).
        #[arg(long)]
        corrupt_sign: bool,
        /// Restrict the suite to one activation.
        #[arg(long)]
        activation: Option<ActivationKind>,
    },
    /// Project one layer of a saved model to a unitary and map it onto an MZI mesh.
    MziCompile {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        layer: usize,
        /// Output tag; defaults to `layer<index>`.
        #[arg(long)]
        tag: Option<String>,
    },
    /// Write the diffraction operator as CSV.
    DumpOperator {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        epsilon: f64,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, env = "COHERENTNN_SEED", default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Activation of the hidden layers (and the output unless overridden).
    #[arg(long)]
    activation: Option<ActivationKind>,
    #[arg(long)]
    output_activation: Option<ActivationKind>,
    /// Init scheme(s): separate, phase, mirror, real, imag. Comma separated.
    #[arg(long, value_delimiter = ',')]
    init: Vec<String>,
    /// Half-width of the uniform init distributions.
    #[arg(long)]
    half_width: Option<f64>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Success threshold on the final mean loss.
    #[arg(long)]
    loss_floor: Option<f64>,
    /// Layer widths, e.g. 4,4,4.
    #[arg(long, value_delimiter = ',')]
    widths: Vec<usize>,
}

/// How a command ended, mapped onto the process exit code.
#[derive(Debug)]
enum Failure {
    /// Bad flags, missing files, malformed inputs.
    Config(String),
    /// Divergence, pole hits, failed verification.
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::PoleProximity { .. }
            | Error::NonFinite(_)
            | Error::NonFiniteLoss { .. }
            | Error::RankDeficient { .. }
            | Error::NotUnitary { .. }
            | Error::NearZeroDivisor { .. } => Failure::Numerical(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}
