//! Phase-accumulation sawtooth oscillator with PolyBLEP wrap correction.
//!
//! The oscillator is split into a phase stage ([`accumulate_phase`]) and
//! stateless waveform stages ([`naive_saw`], [`polyblep_saw`]) so the
//! correction can be applied to any phase trajectory after the fact.
//! Phase is carried in `f64`; output samples are `f32`.

use crate::buffer::SampleBuffer;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OscillatorError {
    #[error("negative f0 {value} Hz at sample {index}")]
    NegativeF0 { index: usize, value: f64 },
    #[error("f0 {value} Hz at sample {index} exceeds Nyquist ({nyquist} Hz)")]
    AboveNyquist { index: usize, value: f64, nyquist: f64 },
    #[error("sample rate must be positive and finite, got {0}")]
    BadSampleRate(f64),
    #[error("initial phase {0} outside [0, 1)")]
    BadInitialPhase(f64),
    #[error("non-finite value {0}")]
    NonFinite(f64),
}

/// Per-sample normalized phase and increment of the oscillator.
///
/// Invariants: `phase[n]` in `[0, 1)`, `increment[n]` in `[0, 0.5]`, equal
/// array lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrack {
    phase: Vec<f64>,
    increment: Vec<f64>,
    sample_rate: f64,
}

impl PhaseTrack {
    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    pub fn increment(&self) -> &[f64] {
        &self.increment
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.phase.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phase.is_empty()
    }

    /// Number of phase wraps, i.e. samples where the phase decreased.
    pub fn wrap_count(&self) -> usize {
        self.phase.windows(2).filter(|w| w[1] < w[0]).count()
    }
}

/// Integrates `f0 / sample_rate` modulo 1, starting at `initial_phase`.
///
/// `phase[0] = initial_phase` and `phase[n] = (phase[n-1] + increment[n]) mod 1`.
pub fn accumulate_phase(
    f0_per_sample: &[f64],
    sample_rate: f64,
    initial_phase: f64,
) -> Result<PhaseTrack, OscillatorError> {
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(OscillatorError::BadSampleRate(sample_rate));
    }
    if !(0.0..1.0).contains(&initial_phase) {
        return Err(OscillatorError::BadInitialPhase(initial_phase));
    }
    let nyquist = sample_rate / 2.0;
    let mut increment = Vec::with_capacity(f0_per_sample.len());
    for (index, &value) in f0_per_sample.iter().enumerate() {
        if value.is_nan() {
            return Err(OscillatorError::NonFinite(value));
        }
        if value < 0.0 {
            return Err(OscillatorError::NegativeF0 { index, value });
        }
        if value > nyquist {
            return Err(OscillatorError::AboveNyquist { index, value, nyquist });
        }
        increment.push(value / sample_rate);
    }

    let mut phase = Vec::with_capacity(increment.len());
    let mut current = initial_phase;
    for (n, &inc) in increment.iter().enumerate() {
        if n > 0 {
            current = wrap_unit(current + inc);
        }
        phase.push(current);
    }
    Ok(PhaseTrack { phase, increment, sample_rate })
}

// inputs are in [0, 1.5); keeps the result strictly below 1
fn wrap_unit(p: f64) -> f64 {
    let w = if p >= 1.0 { p - 1.0 } else { p };
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Raw ramp `2 * phase - 1`.
pub fn naive_saw(track: &PhaseTrack) -> SampleBuffer {
    let samples = track.phase.iter().map(|&p| (2.0 * p - 1.0) as f32).collect();
    SampleBuffer::from_parts(samples, track.sample_rate)
}

/// Two-sample polynomial band-limited step residual.
pub fn polyblep_residual(t: f64) -> Result<f64, OscillatorError> {
    if !t.is_finite() {
        return Err(OscillatorError::NonFinite(t));
    }
    Ok(residual(t))
}

#[inline]
pub(crate) fn residual(t: f64) -> f64 {
    if (-1.0..0.0).contains(&t) {
        t * t + 2.0 * t + 1.0
    } else if (0.0..1.0).contains(&t) {
        -t * t + 2.0 * t - 1.0
    } else {
        0.0
    }
}

/// Sign applied to the pre-wrap residual term `r((phase - 1) / increment)`.
///
/// `Subtract` is the shipped variant: it removes the step on both sides of
/// the wrap. `Add` is kept only so the two can be measured against each
/// other (see `analysis::sign_experiment`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResidualSign {
    Subtract,
    Add,
}

impl ResidualSign {
    pub fn name(self) -> &'static str {
        match self {
            ResidualSign::Subtract => "subtract",
            ResidualSign::Add => "add",
        }
    }
}

/// Alias-corrected sawtooth using the shipped residual sign.
pub fn polyblep_saw(track: &PhaseTrack) -> SampleBuffer {
    polyblep_saw_with_sign(track, ResidualSign::Subtract)
}

/// Ramp with both residual terms evaluated at every sample.
///
/// Samples with zero increment pass through as the naive value.
pub fn polyblep_saw_with_sign(track: &PhaseTrack, sign: ResidualSign) -> SampleBuffer {
    let samples = track
        .phase
        .iter()
        .zip(&track.increment)
        .map(|(&p, &dp)| {
            let raw = 2.0 * p - 1.0;
            if dp <= 0.0 {
                return raw as f32;
            }
            let post = residual(p / dp);
            let pre = residual((p - 1.0) / dp);
            let corrected = match sign {
                ResidualSign::Subtract => raw - post - pre,
                ResidualSign::Add => raw - post + pre,
            };
            corrected as f32
        })
        .collect();
    SampleBuffer::from_parts(samples, track.sample_rate)
}

/// Which excitation waveform to render.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Oscillator {
    Naive,
    #[default]
    PolyBlep,
}

impl Oscillator {
    pub fn render(self, track: &PhaseTrack) -> SampleBuffer {
        match self {
            Oscillator::Naive => naive_saw(track),
            Oscillator::PolyBlep => polyblep_saw(track),
        }
    }
}

impl std::str::FromStr for Oscillator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(Oscillator::Naive),
            "polyblep" => Ok(Oscillator::PolyBlep),
            other => Err(format!("unknown oscillator `{other}` (expected naive|polyblep)")),
        }
    }
}

/// Renders a constant-pitch tone; convenience for analysis and tests.
pub fn render_constant(
    oscillator: Oscillator,
    f0: f64,
    sample_rate: f64,
    n_samples: usize,
) -> Result<SampleBuffer, OscillatorError> {
    let track = accumulate_phase(&vec![f0; n_samples], sample_rate, 0.0)?;
    Ok(oscillator.render(&track))
}
