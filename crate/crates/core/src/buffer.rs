//! Sampled mono waveform shared by every stage of the pipeline.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BufferError {
    #[error("sample rate must be positive and finite, got {0}")]
    BadSampleRate(f64),
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
}

/// A mono buffer of 32-bit samples at a fixed sample rate (Hz).
///
/// Samples are always finite; the nominal amplitude range is `[-1, 1]` but
/// nothing clips on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBuffer {
    samples: Vec<f32>,
    sample_rate: f64,
}

/// The buffer type exchanged with the file layer. Always single-channel.
pub type AudioBuffer = SampleBuffer;

impl SampleBuffer {
    pub fn new(samples: Vec<f32>, sample_rate: f64) -> Result<Self, BufferError> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(BufferError::BadSampleRate(sample_rate));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(BufferError::NonFinite(i));
        }
        Ok(Self { samples, sample_rate })
    }

    /// Constructor for internal callers that already guarantee the invariants.
    pub(crate) fn from_parts(samples: Vec<f32>, sample_rate: f64) -> Self {
        debug_assert!(samples.iter().all(|s| s.is_finite()));
        Self { samples, sample_rate }
    }

    pub fn silence(len: usize, sample_rate: f64) -> Result<Self, BufferError> {
        Self::new(vec![0.0; len], sample_rate)
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f32> {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn channels(&self) -> u16 {
        1
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }
}
