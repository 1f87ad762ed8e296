//! Training-objective terms as standalone functions: multiscale log-STFT
//! distance, voiced-frame log-F0 error, and voicing cross-entropy.
//!
//! Logs are natural throughout. The three terms are reported separately;
//! nothing here weights or combines them.

mod grad;
mod stft;

pub use grad::{grad_consistency_check, GradReport};
pub use stft::{log_mag_stft, StftConfig, StftSet, DEFAULT_FFT_SIZES, DEFAULT_LOG_FLOOR};

use crate::buffer::SampleBuffer;
use thiserror::Error;

/// Lower clamp for voicing probabilities (upper clamp is `1 - eps`).
pub const DEFAULT_CLAMP_EPS: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LossError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("buffer of {len} samples shorter than window of {needed}")]
    TooShort { len: usize, needed: usize },
    #[error("non-positive f0 {value} on voiced frame {frame}")]
    NonPositiveF0OnVoiced { frame: usize, value: f64 },
    #[error("value {value} at index {index} out of range")]
    OutOfRange { index: usize, value: f64 },
    #[error("invalid STFT configuration: {0}")]
    BadConfig(String),
    #[error("function evaluation failed: {0}")]
    EvaluationFailed(String),
}

fn check_len(left: usize, right: usize) -> Result<(), LossError> {
    if left != right {
        Err(LossError::LengthMismatch { left, right })
    } else {
        Ok(())
    }
}

/// Per-configuration Frobenius norms of the log-magnitude difference.
pub fn spectral_terms(x: &SampleBuffer, x_hat: &SampleBuffer, set: &StftSet) -> Result<Vec<f64>, LossError> {
    check_len(x.len(), x_hat.len())?;
    set.configs()
        .iter()
        .map(|cfg| {
            let a = log_mag_stft(x, cfg, set.log_floor())?;
            let b = log_mag_stft(x_hat, cfg, set.log_floor())?;
            let sq: f64 = a
                .iter()
                .flatten()
                .zip(b.iter().flatten())
                .map(|(p, q)| (p - q) * (p - q))
                .sum();
            Ok(sq.sqrt())
        })
        .collect()
}

/// Sum over STFT resolutions of the Frobenius norm of the log-magnitude
/// difference.
pub fn multiscale_spectral_loss(x: &SampleBuffer, x_hat: &SampleBuffer, set: &StftSet) -> Result<f64, LossError> {
    Ok(spectral_terms(x, x_hat, set)?.iter().sum())
}

/// Mean absolute log-ratio over voiced frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F0Loss {
    pub value: f64,
    pub voiced_frames: usize,
}

impl F0Loss {
    /// True when no frame was voiced; `value` is then 0 by convention.
    pub fn empty_voiced(&self) -> bool {
        self.voiced_frames == 0
    }
}

pub fn f0_loss(f0_hat: &[f64], f0_ref: &[f64], voiced_ref: &[bool]) -> Result<F0Loss, LossError> {
    check_len(f0_hat.len(), f0_ref.len())?;
    check_len(f0_hat.len(), voiced_ref.len())?;
    let mut sum = 0.0;
    let mut count = 0usize;
    for (frame, ((&est, &reference), _)) in f0_hat
        .iter()
        .zip(f0_ref)
        .zip(voiced_ref)
        .enumerate()
        .filter(|(_, (_, &v))| v)
    {
        for value in [est, reference] {
            if !(value.is_finite() && value > 0.0) {
                return Err(LossError::NonPositiveF0OnVoiced { frame, value });
            }
        }
        sum += (est.ln() - reference.ln()).abs();
        count += 1;
    }
    let value = if count == 0 { 0.0 } else { sum / count as f64 };
    Ok(F0Loss { value, voiced_frames: count })
}

/// Mean binary cross-entropy of voicing probabilities `v` against 0/1 labels.
pub fn voicing_bce(v: &[f64], v_ref: &[f64], clamp_eps: f64) -> Result<f64, LossError> {
    check_len(v.len(), v_ref.len())?;
    if !(0.0..0.5).contains(&clamp_eps) {
        return Err(LossError::OutOfRange { index: 0, value: clamp_eps });
    }
    if v.is_empty() {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for (index, (&p, &label)) in v.iter().zip(v_ref).enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(LossError::OutOfRange { index, value: p });
        }
        if label != 0.0 && label != 1.0 {
            return Err(LossError::OutOfRange { index, value: label });
        }
        let p = p.clamp(clamp_eps, 1.0 - clamp_eps);
        sum -= if label == 1.0 { p.ln() } else { (1.0 - p).ln() };
    }
    Ok(sum / v.len() as f64)
}

/// Pitch supervision inputs: estimate, reference (0 = unvoiced), and the
/// estimated voicing probability, all per frame.
#[derive(Debug, Clone, Default)]
pub struct ContourInputs<'a> {
    pub f0_ref: Option<&'a [f64]>,
    pub f0_est: Option<&'a [f64]>,
    pub v_est: Option<&'a [f64]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossReport {
    pub spectral: f64,
    pub per_scale: Vec<f64>,
    pub f0: Option<F0Loss>,
    pub voicing: Option<f64>,
}

/// Computes every term whose inputs are present. Reference voicing labels
/// are derived from `f0_ref > 0`.
pub fn loss_report(
    x: &SampleBuffer,
    x_hat: &SampleBuffer,
    set: &StftSet,
    contours: &ContourInputs<'_>,
) -> Result<LossReport, LossError> {
    let per_scale = spectral_terms(x, x_hat, set)?;
    let spectral = per_scale.iter().sum();
    let voiced: Option<Vec<bool>> = contours.f0_ref.map(|r| r.iter().map(|&f| f > 0.0).collect());
    let f0 = match (contours.f0_est, contours.f0_ref, &voiced) {
        (Some(est), Some(reference), Some(mask)) => Some(f0_loss(est, reference, mask)?),
        _ => None,
    };
    let voicing = match (contours.v_est, &voiced) {
        (Some(v), Some(mask)) => {
            let labels: Vec<f64> = mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
            Some(voicing_bce(v, &labels, DEFAULT_CLAMP_EPS)?)
        }
        _ => None,
    };
    Ok(LossReport { spectral, per_scale, f0, voicing })
}
