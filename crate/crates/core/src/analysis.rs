//! Alias measurement for constant-pitch renders.
//!
//! A rendered tone's periodogram is partitioned into three disjoint bin
//! pools: a DC band, narrow bands around every multiple of f0 below Nyquist
//! (harmonic), and everything else (alias). Comparisons are made against an
//! additive sawtooth built only from partials below Nyquist.
//!
//! The periodogram covers the whole buffer. For 1 s at an integer sample
//! rate the bin spacing is 1 Hz, so every integer-Hz harmonic and every
//! folded partial falls on a bin center and Hann leakage stays within one
//! bin of it.

use crate::buffer::SampleBuffer;
use crate::oscillator::{
    accumulate_phase, polyblep_saw_with_sign, render_constant, Oscillator, OscillatorError, ResidualSign,
};
use crate::window::Window;
use rustfft::{num_complex::Complex, FftPlanner};
use std::f64::consts::PI;
use std::fmt::Write as _;
use thiserror::Error;

/// Half-width, in bins, of each harmonic band.
pub const HARMONIC_BIN_TOLERANCE: usize = 3;
/// Bins `0..DC_BAND_BINS` belong to neither pool.
pub const DC_BAND_BINS: usize = 3;
/// ASR values are clamped here; below it only `f32` rounding noise remains.
pub const ASR_FLOOR_DB: f64 = -200.0;
/// Spectral floor for log-spectral distance, relative to the oracle's peak bin.
pub const LSD_FLOOR_RELATIVE: f64 = 1e-10;

/// Constant-f0 sweep used for oscillator comparisons at 16 kHz.
pub const SWEEP_F0_HZ: [f64; 6] = [100.0, 200.0, 400.0, 800.0, 1600.0, 3200.0];
/// Pitches for the residual-sign experiment. The off-grid ones matter: at
/// divisors of the sample rate the pre-wrap residual is always zero.
pub const SIGN_EXPERIMENT_F0_HZ: [f64; 3] = [440.0, 1000.0, 1234.0];
pub const COMPARISON_CSV_HEADER: &str = "f0_hz,asr_naive_db,asr_polyblep_db,asr_delta_db,lsd_naive,lsd_polyblep";
pub const SIGN_CSV_HEADER: &str = "variant,f0_hz,harmonic_power,alias_power,asr_db";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("f0 {f0} Hz above Nyquist ({nyquist} Hz)")]
    AboveNyquist { f0: f64, nyquist: f64 },
    #[error("f0 must be positive, got {0}")]
    NonPositiveF0(f64),
    #[error("empty buffer")]
    Empty,
    #[error("buffer of {len} samples shorter than the required {needed}")]
    BufferTooShort { len: usize, needed: usize },
    #[error("f0 {f0} Hz outside (0, {nyquist}) Hz")]
    F0OutOfRange { f0: f64, nyquist: f64 },
    #[error("duration must be positive, got {0}")]
    BadDuration(f64),
    #[error(transparent)]
    Oscillator(#[from] OscillatorError),
}

/// Sawtooth from its Fourier series, truncated below Nyquist:
/// `-(2/pi) sum_k sin(2 pi k (f0 n / sr + phase0)) / k`.
///
/// Same polarity and scale as the `2 * phase - 1` ramp. A partial landing
/// exactly on Nyquist is left out.
pub fn additive_bandlimited_saw(
    f0: f64,
    sample_rate: f64,
    n_samples: usize,
    phase0: f64,
) -> Result<SampleBuffer, AnalysisError> {
    let nyquist = sample_rate / 2.0;
    if !(f0 > 0.0) {
        return Err(AnalysisError::NonPositiveF0(f0));
    }
    if f0 > nyquist {
        return Err(AnalysisError::AboveNyquist { f0, nyquist });
    }
    let max_k = (nyquist / f0).floor() as usize;
    let partials: Vec<usize> = (1..=max_k)
        .filter(|&k| ((k as f64 * f0) - nyquist).abs() > 1e-9 * nyquist)
        .collect();
    let inc = f0 / sample_rate;
    let samples = (0..n_samples)
        .map(|n| {
            // reduce the phase before multiplying by k to keep sin arguments small
            let phase = (inc * n as f64 + phase0).fract();
            let s: f64 = partials
                .iter()
                .map(|&k| (2.0 * PI * k as f64 * phase).sin() / k as f64)
                .sum();
            (-2.0 / PI * s) as f32
        })
        .collect();
    Ok(SampleBuffer::from_parts(samples, sample_rate))
}

/// One-sided windowed periodogram of the whole buffer, scaled so that a
/// sinusoid of amplitude `A` on a bin center reads `A^2 / 2` in its bin.
pub fn power_spectrum(x: &SampleBuffer, window: Window) -> Result<Vec<f64>, AnalysisError> {
    let len = x.len();
    if len == 0 {
        return Err(AnalysisError::Empty);
    }
    let w = window.coefficients(len);
    let gain: f64 = w.iter().sum();
    let mut buf: Vec<Complex<f64>> = x
        .samples()
        .iter()
        .zip(&w)
        .map(|(&s, &w)| Complex::new(s as f64 * w, 0.0))
        .collect();
    FftPlanner::<f64>::new().plan_fft_forward(len).process(&mut buf);
    let bins = len / 2 + 1;
    let norm = gain * gain;
    Ok(buf[..bins]
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let one_sided = if k == 0 || (len.is_multiple_of(2) && k == len / 2) { 1.0 } else { 2.0 };
            one_sided * c.norm_sqr() / norm
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliasReport {
    pub f0: f64,
    pub sample_rate: f64,
    pub harmonic_power: f64,
    pub alias_power: f64,
    pub dc_power: f64,
    pub total_power: f64,
    /// `10 log10(alias / harmonic)`, clamped at [`ASR_FLOOR_DB`].
    pub asr_db: f64,
    pub n_harmonics: usize,
}

/// Splits the power of a constant-`f0` render into harmonic and alias parts.
/// Needs at least half a second of audio.
pub fn alias_report(x: &SampleBuffer, f0: f64) -> Result<AliasReport, AnalysisError> {
    let sr = x.sample_rate();
    let nyquist = sr / 2.0;
    if !(f0 > 0.0 && f0 < nyquist) {
        return Err(AnalysisError::F0OutOfRange { f0, nyquist });
    }
    let needed = (sr / 2.0).ceil() as usize;
    if x.len() < needed {
        return Err(AnalysisError::BufferTooShort { len: x.len(), needed });
    }
    let power = power_spectrum(x, Window::Hann)?;
    let mask = harmonic_mask(power.len(), x.len(), sr, f0);
    let mut dc = 0.0;
    let mut harmonic = 0.0;
    let mut alias = 0.0;
    for (k, &p) in power.iter().enumerate() {
        if k < DC_BAND_BINS {
            dc += p;
        } else if mask[k] {
            harmonic += p;
        } else {
            alias += p;
        }
    }
    let asr_db = if harmonic > 0.0 {
        10.0 * (alias.max(harmonic * 10f64.powf(ASR_FLOOR_DB / 10.0)) / harmonic).log10()
    } else {
        f64::INFINITY
    };
    Ok(AliasReport {
        f0,
        sample_rate: sr,
        harmonic_power: harmonic,
        alias_power: alias,
        dc_power: dc,
        total_power: power.iter().sum(),
        asr_db,
        n_harmonics: harmonic_count(f0, sr),
    })
}

/// Multiples of `f0` strictly below Nyquist.
pub fn harmonic_count(f0: f64, sample_rate: f64) -> usize {
    let tolerance = 1e-9 * sample_rate;
    ((sample_rate / 2.0 - tolerance) / f0).floor().max(0.0) as usize
}

fn harmonic_mask(bins: usize, len: usize, sr: f64, f0: f64) -> Vec<bool> {
    let bin_hz = sr / len as f64;
    let w = HARMONIC_BIN_TOLERANCE as f64;
    let mut mask = vec![false; bins];
    for k in 1..=harmonic_count(f0, sr) {
        let center = k as f64 * f0 / bin_hz;
        let lo = (center - w).ceil().max(0.0) as usize;
        let hi = ((center + w).floor() as usize).min(bins - 1);
        for m in mask.iter_mut().take(hi + 1).skip(lo) {
            *m = true;
        }
    }
    mask
}

/// Mean absolute difference in dB between the periodograms of `x` and
/// `oracle`, over bins above the DC band. Both spectra are floored at
/// [`LSD_FLOOR_RELATIVE`] times the oracle's peak.
pub fn log_spectral_distance(x: &SampleBuffer, oracle: &SampleBuffer) -> Result<f64, AnalysisError> {
    let px = power_spectrum(x, Window::Hann)?;
    let po = power_spectrum(oracle, Window::Hann)?;
    if px.len() != po.len() {
        return Err(AnalysisError::BufferTooShort { len: x.len(), needed: oracle.len() });
    }
    let floor = po.iter().cloned().fold(0.0, f64::max) * LSD_FLOOR_RELATIVE;
    let floor = if floor > 0.0 { floor } else { f64::MIN_POSITIVE };
    let db = |p: f64| 10.0 * p.max(floor).log10();
    let terms: Vec<f64> = px
        .iter()
        .zip(&po)
        .skip(DC_BAND_BINS)
        .map(|(&a, &b)| (db(a) - db(b)).abs())
        .collect();
    if terms.is_empty() {
        return Ok(0.0);
    }
    Ok(terms.iter().sum::<f64>() / terms.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub f0: f64,
    pub asr_naive: f64,
    pub asr_polyblep: f64,
    /// `asr_naive - asr_polyblep`; positive means PolyBLEP aliases less.
    pub asr_delta: f64,
    pub lsd_naive: f64,
    pub lsd_polyblep: f64,
}

fn sample_count(sample_rate: f64, duration: f64) -> Result<usize, AnalysisError> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(AnalysisError::BadDuration(duration));
    }
    Ok((duration * sample_rate).round() as usize)
}

fn check_f0(f0: f64, sample_rate: f64) -> Result<(), AnalysisError> {
    let nyquist = sample_rate / 2.0;
    if !(f0 > 0.0) {
        return Err(AnalysisError::NonPositiveF0(f0));
    }
    if f0 >= nyquist {
        return Err(AnalysisError::AboveNyquist { f0, nyquist });
    }
    Ok(())
}

/// Renders naive and PolyBLEP sawtooths at each f0 and measures both against
/// the additive oracle. Row order follows `f0_list`.
pub fn compare_oscillators(
    f0_list: &[f64],
    sample_rate: f64,
    duration: f64,
) -> Result<Vec<ComparisonRow>, AnalysisError> {
    let n = sample_count(sample_rate, duration)?;
    f0_list
        .iter()
        .map(|&f0| {
            check_f0(f0, sample_rate)?;
            let naive = render_constant(Oscillator::Naive, f0, sample_rate, n)?;
            let blep = render_constant(Oscillator::PolyBlep, f0, sample_rate, n)?;
            let oracle = additive_bandlimited_saw(f0, sample_rate, n, 0.0)?;
            let asr_naive = alias_report(&naive, f0)?.asr_db;
            let asr_polyblep = alias_report(&blep, f0)?.asr_db;
            Ok(ComparisonRow {
                f0,
                asr_naive,
                asr_polyblep,
                asr_delta: asr_naive - asr_polyblep,
                lsd_naive: log_spectral_distance(&naive, &oracle)?,
                lsd_polyblep: log_spectral_distance(&blep, &oracle)?,
            })
        })
        .collect()
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from(COMPARISON_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6}",
            r.f0, r.asr_naive, r.asr_polyblep, r.asr_delta, r.lsd_naive, r.lsd_polyblep
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignRow {
    pub sign: ResidualSign,
    pub f0: f64,
    pub harmonic_power: f64,
    pub alias_power: f64,
    pub asr_db: f64,
}

/// Renders both pre-wrap residual signs at every f0 and measures their
/// alias power.
pub fn sign_experiment(f0_list: &[f64], sample_rate: f64, duration: f64) -> Result<Vec<SignRow>, AnalysisError> {
    let n = sample_count(sample_rate, duration)?;
    let mut rows = Vec::with_capacity(2 * f0_list.len());
    for &f0 in f0_list {
        check_f0(f0, sample_rate)?;
        let track = accumulate_phase(&vec![f0; n], sample_rate, 0.0)?;
        for sign in [ResidualSign::Subtract, ResidualSign::Add] {
            let report = alias_report(&polyblep_saw_with_sign(&track, sign), f0)?;
            rows.push(SignRow {
                sign,
                f0,
                harmonic_power: report.harmonic_power,
                alias_power: report.alias_power,
                asr_db: report.asr_db,
            });
        }
    }
    Ok(rows)
}

/// The sign with the lower mean ASR across the experiment (`Subtract` on a tie).
pub fn preferred_sign(rows: &[SignRow]) -> ResidualSign {
    let mean = |sign| {
        let v: Vec<f64> = rows.iter().filter(|r| r.sign == sign).map(|r| r.asr_db).collect();
        v.iter().sum::<f64>() / v.len().max(1) as f64
    };
    if mean(ResidualSign::Add) < mean(ResidualSign::Subtract) {
        ResidualSign::Add
    } else {
        ResidualSign::Subtract
    }
}

pub fn sign_csv(rows: &[SignRow]) -> String {
    let mut out = String::from(SIGN_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:.6e},{:.6e},{:.3}",
            r.sign.name(),
            r.f0,
            r.harmonic_power,
            r.alias_power,
            r.asr_db
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SR: f64 = 16000.0;

    fn sine(freq: f64, n: usize) -> SampleBuffer {
        SampleBuffer::new((0..n).map(|i| (2.0 * PI * freq * i as f64 / SR).sin() as f32).collect(), SR).unwrap()
    }

    #[test]
    fn oracle_at_nyquist_is_silent() {
        let x = additive_bandlimited_saw(SR / 2.0, SR, 64, 0.0).unwrap();
        assert!(x.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn oracle_at_quarter_rate_is_one_sinusoid() {
        let x = additive_bandlimited_saw(SR / 4.0, SR, 64, 0.0).unwrap();
        // period of 4 samples: -(2/pi) sin(pi n / 2)
        let a = (2.0 / PI) as f32;
        for (n, &s) in x.samples().iter().enumerate() {
            let expected = [0.0, -a, 0.0, a][n % 4];
            assert!((s - expected).abs() < 1e-6, "{n}: {s}");
        }
    }

    #[test]
    fn oracle_matches_ramp_polarity() {
        // low f0: the truncated series tracks 2*phase - 1 away from the wrap
        let x = additive_bandlimited_saw(50.0, SR, 320, 0.0).unwrap();
        for n in [40usize, 80, 160, 240, 280] {
            let ramp = 2.0 * (n as f64 / 320.0) - 1.0;
            assert!((x.samples()[n] as f64 - ramp).abs() < 0.02, "{n}");
        }
    }

    #[test]
    fn oracle_errors() {
        assert!(matches!(additive_bandlimited_saw(0.0, SR, 10, 0.0), Err(AnalysisError::NonPositiveF0(_))));
        assert!(matches!(additive_bandlimited_saw(9000.0, SR, 10, 0.0), Err(AnalysisError::AboveNyquist { .. })));
    }

    #[test]
    fn spectrum_basics() {
        let zeros = SampleBuffer::silence(1024, SR).unwrap();
        assert!(power_spectrum(&zeros, Window::Hann).unwrap().iter().all(|&p| p == 0.0));
        assert_eq!(power_spectrum(&SampleBuffer::silence(0, SR).unwrap(), Window::Hann), Err(AnalysisError::Empty));

        // 1024 samples at 16 kHz: bin 64 is 1000 Hz
        let p = power_spectrum(&sine(1000.0, 1024), Window::Rectangular).unwrap();
        assert!((p[64] - 0.5).abs() < 1e-7);
        let rest: f64 = p.iter().enumerate().filter(|(k, _)| *k != 64).map(|(_, v)| v).sum();
        assert!(rest < 1e-12);
    }

    #[test]
    fn hann_leakage_off_bin() {
        // half a bin off center is the worst case for leakage
        let n = 1024;
        let freq = 64.5 * SR / n as f64;
        let p = power_spectrum(&sine(freq, n), Window::Hann).unwrap();
        let peak = p.iter().cloned().fold(0.0, f64::max);
        // Hann sidelobes decay at 18 dB/octave: 14 bins (58..=71) sit above
        // -60 dB of the peak
        let above: Vec<usize> = (0..p.len()).filter(|&k| p[k] > peak * 1e-6).collect();
        assert_eq!(above.len(), 14);
        assert_eq!((above[0], above[13]), (58, 71));
        // the +-3 bin harmonic band keeps all but ~1e-4 of the power
        let band: f64 = (62..=67).map(|k| p[k]).sum();
        let frac = band / p.iter().sum::<f64>();
        // about -39 dB leaks outside, which is why off-bin tones cannot be
        // measured to -60 dB with this window
        assert!(frac > 0.9998, "{frac}");
    }

    #[test]
    fn pure_sinusoid_has_no_alias() {
        let r = alias_report(&sine(1000.0, 16000), 1000.0).unwrap();
        assert!(r.asr_db < -60.0, "{r:?}");
        assert_eq!(r.n_harmonics, 7);
    }

    #[test]
    fn report_partitions_total_power() {
        for f0 in [100.0, 440.0, 1000.0, 3200.0] {
            let x = render_constant(Oscillator::Naive, f0, SR, 16000).unwrap();
            let r = alias_report(&x, f0).unwrap();
            let sum = r.harmonic_power + r.alias_power + r.dc_power;
            assert!((sum - r.total_power).abs() <= 1e-6 * r.total_power);
            assert!(r.harmonic_power > 0.0 && r.alias_power >= 0.0);
        }
    }

    #[test]
    fn report_errors() {
        let x = sine(1000.0, 16000);
        assert!(matches!(alias_report(&x, 0.0), Err(AnalysisError::F0OutOfRange { .. })));
        assert!(matches!(alias_report(&x, 8000.0), Err(AnalysisError::F0OutOfRange { .. })));
        assert!(matches!(alias_report(&sine(1000.0, 7999), 1000.0), Err(AnalysisError::BufferTooShort { .. })));
    }

    #[test]
    fn harmonic_counts() {
        assert_eq!(harmonic_count(1000.0, SR), 7);
        assert_eq!(harmonic_count(440.0, SR), 18);
        assert_eq!(harmonic_count(3000.0, SR), 2);
        assert_eq!(harmonic_count(4000.0, SR), 1);
    }

    #[test]
    fn compare_rows_and_csv() {
        assert!(compare_oscillators(&[], SR, 1.0).unwrap().is_empty());
        assert!(matches!(compare_oscillators(&[8000.0], SR, 1.0), Err(AnalysisError::AboveNyquist { .. })));
        let rows = compare_oscillators(&[2000.0], SR, 1.0).unwrap();
        assert!(rows[0].asr_polyblep < rows[0].asr_naive);
        let csv = comparison_csv(&rows);
        assert!(csv.starts_with(COMPARISON_CSV_HEADER));
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn naive_aliasing_grows_with_f0() {
        // at 3200 Hz every fold lands on a harmonic, so stop at 1600
        let rows = compare_oscillators(&SWEEP_F0_HZ[..5], 16000.0, 1.0).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].asr_naive >= w[0].asr_naive, "{:?}", w);
        }
    }

    #[test]
    fn subtract_sign_wins() {
        let rows = sign_experiment(&[440.0, 1234.0], SR, 1.0).unwrap();
        assert_eq!(preferred_sign(&rows), ResidualSign::Subtract);
        assert!(sign_csv(&rows).starts_with(SIGN_CSV_HEADER));
    }
}
