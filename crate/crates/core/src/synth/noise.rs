//! Filtered noise: random-magnitude, random-phase spectra shaped by a
//! per-frame magnitude mask, inverse transformed and overlap-added.

use super::SynthError;
use crate::buffer::SampleBuffer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{num_complex::Complex, FftPlanner};
use std::f64::consts::PI;

/// Renders `n_samples` of noise shaped by `noise_mag` (one row of
/// `fft_size/2 + 1` magnitudes per frame).
///
/// Frame `i` is centered on sample `i*hop` under a periodic Hann window of
/// length `fft_size`; rows past either end are held. Random draws come from
/// a ChaCha8 stream seeded with `seed`, consumed in frame order, so output is
/// a pure function of the arguments.
pub fn synth_noise(
    noise_mag: &[Vec<f64>],
    fft_size: usize,
    hop: usize,
    n_samples: usize,
    seed: u64,
    sample_rate: f64,
) -> Result<SampleBuffer, SynthError> {
    if noise_mag.is_empty() {
        return Err(SynthError::EmptyInput);
    }
    if fft_size < 2 || !fft_size.is_multiple_of(2) || hop == 0 || hop > fft_size {
        return Err(SynthError::BadHop { hop, fft_size });
    }
    let bins = fft_size / 2 + 1;
    if let Some(row) = noise_mag.iter().find(|r| r.len() != bins) {
        return Err(SynthError::BadBinCount { expected: bins, got: row.len() });
    }

    let n = fft_size;
    let half = (n / 2) as isize;
    let hop_i = hop as isize;
    let window: Vec<f64> = (0..n).map(|j| 0.5 - 0.5 * (2.0 * PI * j as f64 / n as f64).cos()).collect();
    let ifft = FftPlanner::<f64>::new().plan_fft_inverse(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spectrum = vec![Complex::new(0.0, 0.0); n];
    let mut out = vec![0.0f64; n_samples];

    // every frame whose window overlaps [0, n_samples)
    let first = -(half - 1).div_euclid(hop_i);
    let last = (n_samples as isize + half - 1).div_euclid(hop_i);
    let last_row = noise_mag.len() as isize - 1;

    for i in first..=last {
        let row = &noise_mag[i.clamp(0, last_row) as usize];
        for (k, &m) in row.iter().enumerate() {
            let u: f64 = rng.gen();
            let theta = rng.gen::<f64>() * 2.0 * PI;
            let amp = m * u;
            spectrum[k] = if k == 0 || k == bins - 1 {
                Complex::new(amp * theta.cos(), 0.0)
            } else {
                Complex::from_polar(amp, theta)
            };
        }
        for k in 1..bins - 1 {
            spectrum[n - k] = spectrum[k].conj();
        }
        if row.iter().all(|&m| m == 0.0) {
            continue;
        }
        ifft.process(&mut spectrum);
        let start = i * hop_i - half;
        for (j, c) in spectrum.iter().enumerate() {
            let pos = start + j as isize;
            if pos >= 0 && (pos as usize) < n_samples {
                out[pos as usize] += c.re / n as f64 * window[j];
            }
        }
    }

    Ok(SampleBuffer::from_parts(out.into_iter().map(|v| v as f32).collect(), sample_rate))
}
