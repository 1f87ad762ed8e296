use crate::{Command, OscillatorArg, VoicingArg};
use blepvox_core::analysis::{self, comparison_csv, preferred_sign, sign_csv, sign_experiment};
use blepvox_core::losses::{loss_report, ContourInputs};
use blepvox_core::synth::DEFAULT_ENVELOPE_POINTS;
use blepvox_core::{
    alias_report, compare_oscillators, read_params, read_wav, synthesize_with, write_params, write_wav,
    AudioIoError, F0Contour, Oscillator, StftSet, SynthParams, WavFormat,
};
use std::fmt;
use std::io::Write;
use std::path::Path;

pub const ALIAS_CSV_HEADER: &str = "f0_hz,harmonic_power,alias_power,asr_db";

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<AudioIoError> for CliError {
    fn from(e: AudioIoError) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Io(e.to_string())
        }
    }
}

fn invalid(e: impl fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

fn io_failure(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Render { params, out, oscillator, seed } => render(&params, &out, oscillator, seed),
        Command::AnalyzeAlias { input, f0, csv } => analyze_alias(&input, f0, csv.as_deref()),
        Command::CompareOsc { f0_list, sample_rate, duration, csv } => {
            compare_osc(&f0_list, sample_rate, duration, csv.as_deref())
        }
        Command::Loss { reference, estimate, f0_ref, f0_est, v_est } => {
            loss(&reference, &estimate, f0_ref.as_deref(), f0_est.as_deref(), v_est.as_deref())
        }
        Command::GenParams { f0, duration, voicing, out, seed, env, noise, sample_rate, hop, fft_size, block } => {
            let spec = GenSpec { f0: &f0, duration, voicing, seed, env, noise, sample_rate, hop, fft_size, block };
            let params = gen_params(&spec)?;
            write_params(&params, &out)?;
            println!("frames: {}", params.frame_count());
            println!("samples: {}", params.n_samples());
            Ok(())
        }
        Command::SignExperiment { f0_list, sample_rate, duration, csv } => {
            let list = f0_list.unwrap_or_else(|| analysis::SIGN_EXPERIMENT_F0_HZ.to_vec());
            sign(&list, sample_rate, duration, csv.as_deref())
        }
    }
}

fn render(params: &Path, out: &Path, oscillator: OscillatorArg, seed: Option<u64>) -> Result<(), CliError> {
    let mut p = read_params(params)?;
    if let Some(seed) = seed {
        p = p.with_seed(seed);
    }
    let osc = match oscillator {
        OscillatorArg::Naive => Oscillator::Naive,
        OscillatorArg::Polyblep => Oscillator::PolyBlep,
    };
    let audio = synthesize_with(&p, osc).map_err(invalid)?;
    write_wav(&audio, out, WavFormat::Float32)?;
    println!("duration: {:.6} s", audio.duration_secs());
    println!("frames: {}", p.frame_count());
    println!("oscillator: {}", if osc == Oscillator::Naive { "naive" } else { "polyblep" });
    Ok(())
}

fn analyze_alias(input: &Path, f0: f64, csv: Option<&Path>) -> Result<(), CliError> {
    let audio = read_wav(input)?;
    let report = alias_report(&audio, f0).map_err(invalid)?;
    let fields = [
        format!("{:.6e}", report.harmonic_power),
        format!("{:.6e}", report.alias_power),
        format!("{:.6}", report.asr_db),
    ];
    println!("harmonic_power: {}", fields[0]);
    println!("alias_power: {}", fields[1]);
    println!("asr_db: {}", fields[2]);
    if let Some(path) = csv {
        let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
        let mut file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| io_failure(path, e))?;
        let mut text = String::new();
        if fresh {
            text.push_str(ALIAS_CSV_HEADER);
            text.push('\n');
        }
        text.push_str(&format!("{},{}\n", f0, fields.join(",")));
        file.write_all(text.as_bytes()).map_err(|e| io_failure(path, e))?;
    }
    Ok(())
}

fn compare_osc(f0_list: &[f64], sample_rate: f64, duration: f64, csv: Option<&Path>) -> Result<(), CliError> {
    if f0_list.is_empty() {
        return Err(invalid("--f0-list must name at least one pitch"));
    }
    let rows = compare_oscillators(f0_list, sample_rate, duration).map_err(invalid)?;
    for r in &rows {
        println!(
            "f0 {} Hz: asr naive {:.2} dB, polyblep {:.2} dB, delta {:.2} dB; lsd naive {:.4}, polyblep {:.4}",
            r.f0, r.asr_naive, r.asr_polyblep, r.asr_delta, r.lsd_naive, r.lsd_polyblep
        );
    }
    if let Some(path) = csv {
        std::fs::write(path, comparison_csv(&rows)).map_err(|e| io_failure(path, e))?;
    }
    Ok(())
}

/// Reads one number per line; blank lines and `#` comments are skipped.
pub fn read_contour(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| invalid(format!("{}:{}: not a number: `{line}`", path.display(), i + 1)))?;
        values.push(v);
    }
    Ok(values)
}

fn loss(
    reference: &Path,
    estimate: &Path,
    f0_ref: Option<&Path>,
    f0_est: Option<&Path>,
    v_est: Option<&Path>,
) -> Result<(), CliError> {
    let x = read_wav(reference)?;
    let x_hat = read_wav(estimate)?;
    if x.sample_rate() != x_hat.sample_rate() {
        return Err(invalid(format!(
            "sample rates differ: {} vs {}",
            x.sample_rate(),
            x_hat.sample_rate()
        )));
    }
    let load = |p: Option<&Path>| p.map(read_contour).transpose();
    let (f0_ref, f0_est, v_est) = (load(f0_ref)?, load(f0_est)?, load(v_est)?);
    let contours = ContourInputs {
        f0_ref: f0_ref.as_deref(),
        f0_est: f0_est.as_deref(),
        v_est: v_est.as_deref(),
    };
    let report = loss_report(&x, &x_hat, &StftSet::default(), &contours).map_err(invalid)?;
    println!("L_spec: {:.6}", report.spectral);
    if let Some(f0) = report.f0 {
        println!("L_F0: {:.6}", f0.value);
        if f0.empty_voiced() {
            eprintln!("note: no voiced reference frames; L_F0 is 0 by convention");
        }
    }
    if let Some(v) = report.voicing {
        println!("L_voiced: {v:.6}");
    }
    Ok(())
}

pub struct GenSpec<'a> {
    pub f0: &'a str,
    pub duration: f64,
    pub voicing: VoicingArg,
    pub seed: u64,
    pub env: f64,
    pub noise: f64,
    pub sample_rate: f64,
    pub hop: usize,
    pub fft_size: usize,
    pub block: usize,
}

fn parse_f0(text: &str) -> Result<(f64, f64), CliError> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| invalid(format!("--f0: not a number: `{s}`")))
    };
    match text.split_once(':') {
        Some((a, b)) => Ok((num(a)?, num(b)?)),
        None => {
            let v = num(text)?;
            Ok((v, v))
        }
    }
}

/// Frame count is `floor(duration * sample_rate / hop)`.
fn gen_params(spec: &GenSpec<'_>) -> Result<SynthParams, CliError> {
    let (start, end) = parse_f0(spec.f0)?;
    if !(spec.duration.is_finite() && spec.duration > 0.0) {
        return Err(invalid(format!("--duration must be positive, got {}", spec.duration)));
    }
    if spec.hop == 0 {
        return Err(invalid("--hop must be positive"));
    }
    if spec.block == 0 {
        return Err(invalid("--block must be positive"));
    }
    let frames = (spec.duration * spec.sample_rate / spec.hop as f64).floor();
    if !(frames >= 1.0) {
        return Err(invalid(format!("--duration {} is shorter than one hop", spec.duration)));
    }
    let frames = frames as usize;
    let f0: Vec<f64> = (0..frames)
        .map(|i| {
            if frames == 1 {
                start
            } else {
                start + (end - start) * i as f64 / (frames - 1) as f64
            }
        })
        .collect();
    let voicing: Vec<f64> = (0..frames)
        .map(|i| match spec.voicing {
            VoicingArg::Voiced => 1.0,
            VoicingArg::Unvoiced => 0.0,
            VoicingArg::Alternating => {
                if (i / spec.block).is_multiple_of(2) {
                    1.0
                } else {
                    0.0
                }
            }
        })
        .collect();
    let contour = F0Contour::new(f0, voicing, spec.hop, spec.sample_rate).map_err(invalid)?;
    let env = vec![vec![spec.env; DEFAULT_ENVELOPE_POINTS]; frames];
    let noise = vec![vec![spec.noise; spec.fft_size / 2 + 1]; frames];
    SynthParams::new(contour, env, noise, spec.fft_size, spec.seed).map_err(invalid)
}

fn sign(f0_list: &[f64], sample_rate: f64, duration: f64, csv: Option<&Path>) -> Result<(), CliError> {
    if f0_list.is_empty() {
        return Err(invalid("--f0-list must name at least one pitch"));
    }
    let rows = sign_experiment(f0_list, sample_rate, duration).map_err(invalid)?;
    for r in &rows {
        println!("f0 {} Hz, {}: asr {:.3} dB", r.f0, r.sign.name(), r.asr_db);
    }
    println!("preferred: {}", preferred_sign(&rows).name());
    if let Some(path) = csv {
        std::fs::write(path, sign_csv(&rows)).map_err(|e| io_failure(path, e))?;
    }
    Ok(())
}
