//! `blepvox` command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 filesystem failure.

mod commands;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "blepvox", version, about = "Band-limited excitation synthesis and alias analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OscillatorArg {
    Naive,
    Polyblep,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VoicingArg {
    Voiced,
    Unvoiced,
    Alternating,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render a parameter file to a float32 WAV.
    Render {
        params: PathBuf,
        out: PathBuf,
        #[arg(long, value_enum, default_value = "polyblep")]
        oscillator: OscillatorArg,
        /// Overrides the seed stored in the parameter file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Split a mono WAV's power into harmonic and alias parts.
    AnalyzeAlias {
        input: PathBuf,
        #[arg(long)]
        f0: f64,
        /// Append one result row to this CSV (header written when empty).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Compare naive and PolyBLEP sawtooths against the additive oracle.
    CompareOsc {
        #[arg(long, value_delimiter = ',', required = true)]
        f0_list: Vec<f64>,
        #[arg(long, default_value_t = 16000.0)]
        sample_rate: f64,
        #[arg(long, default_value_t = 1.0)]
        duration: f64,
        /// Write (overwrite) the comparison table here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Compute the spectral, F0 and voicing losses.
    Loss {
        reference: PathBuf,
        estimate: PathBuf,
        /// Reference f0 per frame, one value per line; 0 marks unvoiced.
        #[arg(long)]
        f0_ref: Option<PathBuf>,
        #[arg(long)]
        f0_est: Option<PathBuf>,
        /// Estimated voicing probability per frame, one value per line.
        #[arg(long)]
        v_est: Option<PathBuf>,
    },
    /// Write a parameter file for a constant or swept tone.
    GenParams {
        /// Constant pitch `200` or linear sweep `100:400` (Hz).
        #[arg(long)]
        f0: String,
        #[arg(long, default_value_t = 1.0)]
        duration: f64,
        #[arg(long, value_enum, default_value = "voiced")]
        voicing: VoicingArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Flat harmonic envelope gain.
        #[arg(long, default_value_t = 1.0)]
        env: f64,
        /// Flat noise magnitude.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 16000.0)]
        sample_rate: f64,
        #[arg(long, default_value_t = 256)]
        hop: usize,
        #[arg(long, default_value_t = 512)]
        fft_size: usize,
        /// Frames per block for `--voicing alternating`.
        #[arg(long, default_value_t = 8)]
        block: usize,
    },
    /// Measure both pre-wrap residual signs and report which aliases less.
    SignExperiment {
        #[arg(long, value_delimiter = ',')]
        f0_list: Option<Vec<f64>>,
        #[arg(long, default_value_t = 16000.0)]
        sample_rate: f64,
        #[arg(long, default_value_t = 1.0)]
        duration: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
