//! Frame-wise zero-phase FIR filtering by a sampled magnitude envelope.

use super::SynthError;
use crate::buffer::SampleBuffer;
use std::f64::consts::PI;

/// Filter length; the impulse response spans `-(FIR_TAPS/2) ..= FIR_TAPS/2`.
pub const FIR_TAPS: usize = 257;

/// Linearly resamples envelope points (uniform over `[0, Nyquist]`) onto
/// `bins` uniformly spaced frequencies over the same range.
fn envelope_to_bins(envelope: &[f64], bins: usize) -> Vec<f64> {
    if envelope.len() == 1 || bins == 1 {
        return vec![envelope[0]; bins];
    }
    let last = envelope.len() - 1;
    (0..bins)
        .map(|k| {
            let pos = k as f64 * last as f64 / (bins - 1) as f64;
            let i = (pos.floor() as usize).min(last - 1);
            let frac = pos - i as f64;
            let (a, b) = (envelope[i], envelope[i + 1]);
            a + (b - a) * frac
        })
        .collect()
}

/// Designs a real, symmetric (zero-phase) impulse response whose frequency
/// samples on an `fft_size` grid follow `envelope`, tapered by a raised
/// cosine. Returns taps for offsets `-half ..= half`.
pub fn design_zero_phase_fir(envelope: &[f64], fft_size: usize) -> Vec<f64> {
    let n = fft_size;
    let bins = n / 2 + 1;
    let mag = envelope_to_bins(envelope, bins);
    let half = (FIR_TAPS / 2).min(n / 2);
    let cos_table: Vec<f64> = (0..n).map(|j| (2.0 * PI * j as f64 / n as f64).cos()).collect();

    let mut taps = vec![0.0; 2 * half + 1];
    for m in 0..=half {
        // inverse real DFT of a real, even spectrum
        let mut acc = mag[0] + if m % 2 == 0 { mag[bins - 1] } else { -mag[bins - 1] };
        for (k, &h) in mag.iter().enumerate().take(bins - 1).skip(1) {
            acc += 2.0 * h * cos_table[(k * m) % n];
        }
        let taper = 0.5 * (1.0 + (PI * m as f64 / (half as f64 + 1.0)).cos());
        let v = acc / n as f64 * taper;
        taps[half + m] = v;
        taps[half - m] = v;
    }
    taps
}

/// Filters `excitation` frame by frame. Frame `i` is the excitation under a
/// length-`2*hop` Hann window centered on sample `i*hop`; windows sum to one
/// at every sample, so a flat unit envelope leaves the signal unchanged.
///
/// The excitation may end with a partial frame: its length must lie in
/// `((frames-1)*hop, frames*hop]`.
pub fn apply_harmonic_envelope(
    excitation: &SampleBuffer,
    harmonic_env: &[Vec<f64>],
    hop: usize,
    fft_size: usize,
) -> Result<SampleBuffer, SynthError> {
    let frames = harmonic_env.len();
    if frames == 0 || harmonic_env.iter().any(|e| e.is_empty()) {
        return Err(SynthError::EmptyEnvelope);
    }
    if let Some(frame) = harmonic_env
        .iter()
        .position(|e| e.iter().any(|v| !(v.is_finite() && *v >= 0.0)))
    {
        return Err(SynthError::NonFiniteEnvelope { frame });
    }
    if hop == 0 || fft_size < 2 {
        return Err(SynthError::BadHop { hop, fft_size });
    }
    let len = excitation.len();
    if len > frames * hop || len <= (frames - 1) * hop {
        return Err(SynthError::LengthMismatch { left: len, right: frames * hop });
    }

    let x = excitation.samples();
    let window: Vec<f64> = (0..2 * hop)
        .map(|j| 0.5 - 0.5 * (PI * j as f64 / hop as f64).cos())
        .collect();
    let mut out = vec![0.0f64; len];
    let mut segment = vec![0.0f64; 2 * hop];
    let mut cached: Option<(usize, Vec<f64>)> = None;

    // frames 0..=F so the tail after the last center is fully covered
    for i in 0..=frames {
        let env_index = i.min(frames - 1);
        let start = (i * hop) as isize - hop as isize;
        for (j, s) in segment.iter_mut().enumerate() {
            let n = start + j as isize;
            *s = if n >= 0 && (n as usize) < len { x[n as usize] as f64 * window[j] } else { 0.0 };
        }
        if segment.iter().all(|&s| s == 0.0) {
            continue;
        }
        let taps = match &cached {
            Some((idx, taps)) if harmonic_env[*idx] == harmonic_env[env_index] => taps.clone(),
            _ => {
                let t = design_zero_phase_fir(&harmonic_env[env_index], fft_size);
                cached = Some((env_index, t.clone()));
                t
            }
        };
        let half = (taps.len() / 2) as isize;
        for (j, &s) in segment.iter().enumerate() {
            if s == 0.0 {
                continue;
            }
            let center = start + j as isize;
            let lo = (center - half).max(0);
            let hi = (center + half).min(len as isize - 1);
            for n in lo..=hi {
                out[n as usize] += s * taps[(n - center + half) as usize];
            }
        }
    }
    Ok(SampleBuffer::from_parts(
        out.into_iter().map(|v| v as f32).collect(),
        excitation.sample_rate(),
    ))
}
