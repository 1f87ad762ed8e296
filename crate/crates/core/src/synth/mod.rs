//! Subtractive synthesis: a voicing-gated, envelope-filtered sawtooth plus
//! spectrally shaped noise, driven by frame-rate parameters.

mod envelope;
mod noise;

pub use envelope::{apply_harmonic_envelope, design_zero_phase_fir, FIR_TAPS};
pub use noise::synth_noise;

use crate::buffer::SampleBuffer;
use crate::oscillator::{accumulate_phase, Oscillator, OscillatorError};
use thiserror::Error;

pub const DEFAULT_SAMPLE_RATE: f64 = 16000.0;
pub const DEFAULT_FFT_SIZE: usize = 512;
pub const DEFAULT_HOP: usize = 256;
/// Points in the harmonic envelope, uniformly spaced from DC to Nyquist.
pub const DEFAULT_ENVELOPE_POINTS: usize = 65;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("no frames")]
    EmptyInput,
    #[error("expected {expected} noise bins, got {got}")]
    BadBinCount { expected: usize, got: usize },
    #[error("hop {hop} invalid for fft size {fft_size}")]
    BadHop { hop: usize, fft_size: usize },
    #[error("harmonic envelope has no points")]
    EmptyEnvelope,
    #[error("non-finite or negative harmonic envelope value in frame {frame}")]
    NonFiniteEnvelope { frame: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error(transparent)]
    Oscillator(#[from] OscillatorError),
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> SynthError {
    SynthError::Invalid { field: field.into(), reason: reason.into() }
}

/// Frame-rate fundamental frequency (0 = unvoiced) and voicing probability.
#[derive(Debug, Clone, PartialEq)]
pub struct F0Contour {
    f0: Vec<f64>,
    voicing: Vec<f64>,
    hop: usize,
    sample_rate: f64,
}

impl F0Contour {
    pub fn new(
        f0: Vec<f64>,
        voicing: Vec<f64>,
        hop: usize,
        sample_rate: f64,
    ) -> Result<Self, SynthError> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(invalid("sample_rate", format!("must be positive, got {sample_rate}")));
        }
        if hop == 0 {
            return Err(invalid("hop", "must be at least 1"));
        }
        if f0.len() != voicing.len() {
            return Err(SynthError::LengthMismatch { left: f0.len(), right: voicing.len() });
        }
        let nyquist = sample_rate / 2.0;
        for (i, &f) in f0.iter().enumerate() {
            if !(f.is_finite() && (0.0..=nyquist).contains(&f)) {
                return Err(invalid(format!("frames[{i}].f0"), format!("{f} outside [0, {nyquist}]")));
            }
        }
        for (i, &v) in voicing.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(format!("frames[{i}].voicing"), format!("{v} outside [0, 1]")));
            }
        }
        Ok(Self { f0, voicing, hop, sample_rate })
    }

    pub fn f0(&self) -> &[f64] {
        &self.f0
    }

    pub fn voicing(&self) -> &[f64] {
        &self.voicing
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn frame_count(&self) -> usize {
        self.f0.len()
    }

    /// Reference voicing labels: a frame is voiced iff its f0 is positive.
    pub fn voiced_mask(&self) -> Vec<bool> {
        self.f0.iter().map(|&f| f > 0.0).collect()
    }
}

/// Everything needed to render one utterance.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    contour: F0Contour,
    harmonic_env: Vec<Vec<f64>>,
    noise_mag: Vec<Vec<f64>>,
    fft_size: usize,
    seed: u64,
}

impl SynthParams {
    pub fn new(
        contour: F0Contour,
        harmonic_env: Vec<Vec<f64>>,
        noise_mag: Vec<Vec<f64>>,
        fft_size: usize,
        seed: u64,
    ) -> Result<Self, SynthError> {
        let frames = contour.frame_count();
        if frames == 0 {
            return Err(SynthError::EmptyInput);
        }
        if fft_size < 2 || !fft_size.is_multiple_of(2) {
            return Err(invalid("fft_size", format!("must be even and >= 2, got {fft_size}")));
        }
        if contour.hop() > fft_size {
            return Err(SynthError::BadHop { hop: contour.hop(), fft_size });
        }
        if harmonic_env.len() != frames {
            return Err(invalid("frames", format!("{} envelopes for {frames} frames", harmonic_env.len())));
        }
        if noise_mag.len() != frames {
            return Err(invalid("frames", format!("{} noise spectra for {frames} frames", noise_mag.len())));
        }
        let env_points = harmonic_env[0].len();
        if env_points == 0 {
            return Err(SynthError::EmptyEnvelope);
        }
        let bins = fft_size / 2 + 1;
        for (i, (env, mag)) in harmonic_env.iter().zip(&noise_mag).enumerate() {
            if env.len() != env_points {
                return Err(invalid(
                    format!("frames[{i}].harmonic_env"),
                    format!("length {} differs from frame 0 ({env_points})", env.len()),
                ));
            }
            if mag.len() != bins {
                return Err(invalid(
                    format!("frames[{i}].noise_mag"),
                    format!("length {} but fft_size {fft_size} needs {bins}", mag.len()),
                ));
            }
            if let Some(v) = env.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(invalid(format!("frames[{i}].harmonic_env"), format!("value {v} not finite and >= 0")));
            }
            if let Some(v) = mag.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(invalid(format!("frames[{i}].noise_mag"), format!("value {v} not finite and >= 0")));
            }
        }
        Ok(Self { contour, harmonic_env, noise_mag, fft_size, seed })
    }

    pub fn contour(&self) -> &F0Contour {
        &self.contour
    }

    pub fn harmonic_env(&self) -> &[Vec<f64>] {
        &self.harmonic_env
    }

    pub fn noise_mag(&self) -> &[Vec<f64>] {
        &self.noise_mag
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn hop(&self) -> usize {
        self.contour.hop
    }

    pub fn sample_rate(&self) -> f64 {
        self.contour.sample_rate
    }

    pub fn frame_count(&self) -> usize {
        self.contour.frame_count()
    }

    pub fn n_samples(&self) -> usize {
        self.frame_count() * self.hop()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Multiplies every harmonic envelope value by `factor` (must be >= 0).
    pub fn scale_envelope(mut self, factor: f64) -> Result<Self, SynthError> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(invalid("harmonic_env", format!("scale {factor} not finite and >= 0")));
        }
        for env in &mut self.harmonic_env {
            env.iter_mut().for_each(|v| *v *= factor);
        }
        Ok(self)
    }
}

/// Linear interpolation between frame centers at `i * hop`, holding the end
/// values outside the first and last centers.
pub fn upsample_frames(values: &[f64], hop: usize, n_samples: usize) -> Result<Vec<f64>, SynthError> {
    if values.is_empty() {
        return Err(SynthError::EmptyInput);
    }
    if hop == 0 {
        return Err(SynthError::BadHop { hop, fft_size: 0 });
    }
    let last = values.len() - 1;
    Ok((0..n_samples)
        .map(|n| {
            let i = n / hop;
            if i >= last {
                return values[last];
            }
            let frac = (n % hop) as f64 / hop as f64;
            let (a, b) = (values[i], values[i + 1]);
            a + (b - a) * frac
        })
        .collect())
}

/// Soft gate: `harmonic[n] * voicing[n]`.
pub fn gate_voicing(harmonic: &SampleBuffer, voicing_per_sample: &[f64]) -> Result<SampleBuffer, SynthError> {
    if harmonic.len() != voicing_per_sample.len() {
        return Err(SynthError::LengthMismatch { left: harmonic.len(), right: voicing_per_sample.len() });
    }
    let samples = harmonic
        .samples()
        .iter()
        .zip(voicing_per_sample)
        .map(|(&h, &v)| h * v as f32)
        .collect();
    Ok(SampleBuffer::from_parts(samples, harmonic.sample_rate()))
}

/// The two additive branches of a render, kept apart for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct Branches {
    pub harmonic: SampleBuffer,
    pub noise: SampleBuffer,
}

impl Branches {
    pub fn mix(&self) -> SampleBuffer {
        let samples = self
            .harmonic
            .samples()
            .iter()
            .zip(self.noise.samples())
            .map(|(&h, &n)| h + n)
            .collect();
        SampleBuffer::from_parts(samples, self.harmonic.sample_rate())
    }
}

pub fn synthesize_branches(params: &SynthParams, oscillator: Oscillator) -> Result<Branches, SynthError> {
    let hop = params.hop();
    let n = params.n_samples();
    let sr = params.sample_rate();

    let f0 = upsample_frames(params.contour.f0(), hop, n)?;
    let voicing = upsample_frames(params.contour.voicing(), hop, n)?;
    let track = accumulate_phase(&f0, sr, 0.0)?;
    let excitation = oscillator.render(&track);
    let filtered = apply_harmonic_envelope(&excitation, &params.harmonic_env, hop, params.fft_size)?;
    let harmonic = gate_voicing(&filtered, &voicing)?;
    let noise = synth_noise(&params.noise_mag, params.fft_size, hop, n, params.seed, sr)?;
    Ok(Branches { harmonic, noise })
}

/// Renders with the given excitation oscillator.
pub fn synthesize_with(params: &SynthParams, oscillator: Oscillator) -> Result<SampleBuffer, SynthError> {
    Ok(synthesize_branches(params, oscillator)?.mix())
}

/// Renders with the PolyBLEP excitation.
pub fn synthesize(params: &SynthParams) -> Result<SampleBuffer, SynthError> {
    synthesize_with(params, Oscillator::PolyBlep)
}
