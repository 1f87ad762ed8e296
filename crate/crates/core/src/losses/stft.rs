use super::LossError;
use crate::buffer::SampleBuffer;
use crate::window::Window;
use rustfft::{num_complex::Complex, FftPlanner};

/// One STFT resolution: frames of `window_size` samples every `hop`,
/// zero-padded to `fft_size`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StftConfig {
    fft_size: usize,
    window_size: usize,
    hop: usize,
    window: Window,
}

impl StftConfig {
    pub fn new(fft_size: usize, window_size: usize, hop: usize, window: Window) -> Result<Self, LossError> {
        if fft_size == 0 || window_size == 0 || window_size > fft_size || hop == 0 || hop > window_size {
            return Err(LossError::BadConfig(format!(
                "fft {fft_size}, window {window_size}, hop {hop}: need 1 <= hop <= window <= fft"
            )));
        }
        Ok(Self { fft_size, window_size, hop, window })
    }

    /// Window equal to the FFT size, hop a quarter of it, Hann taper.
    pub fn standard(fft_size: usize) -> Self {
        Self::new(fft_size, fft_size, (fft_size / 4).max(1), Window::Hann).expect("valid standard config")
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    pub fn window_size(&self) -> usize {
        self.window_size
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    pub fn frame_count(&self, len: usize) -> usize {
        if len < self.window_size {
            0
        } else {
            (len - self.window_size) / self.hop + 1
        }
    }
}

/// Ordered set of STFT resolutions plus the magnitude floor used inside the log.
#[derive(Debug, Clone, PartialEq)]
pub struct StftSet {
    configs: Vec<StftConfig>,
    log_floor: f64,
}

pub const DEFAULT_LOG_FLOOR: f64 = 1e-7;
pub const DEFAULT_FFT_SIZES: [usize; 6] = [2048, 1024, 512, 256, 128, 64];

impl StftSet {
    pub fn new(configs: Vec<StftConfig>, log_floor: f64) -> Result<Self, LossError> {
        if configs.is_empty() {
            return Err(LossError::BadConfig("empty STFT set".into()));
        }
        if !(log_floor.is_finite() && log_floor > 0.0) {
            return Err(LossError::BadConfig(format!("log floor must be positive, got {log_floor}")));
        }
        Ok(Self { configs, log_floor })
    }

    pub fn configs(&self) -> &[StftConfig] {
        &self.configs
    }

    pub fn log_floor(&self) -> f64 {
        self.log_floor
    }

    pub fn max_window(&self) -> usize {
        self.configs.iter().map(|c| c.window_size).max().unwrap_or(0)
    }
}

impl Default for StftSet {
    fn default() -> Self {
        Self {
            configs: DEFAULT_FFT_SIZES.iter().map(|&n| StftConfig::standard(n)).collect(),
            log_floor: DEFAULT_LOG_FLOOR,
        }
    }
}

/// `ln(max(|STFT|, log_floor))`, one row of `fft_size/2 + 1` bins per frame.
pub fn log_mag_stft(x: &SampleBuffer, config: &StftConfig, log_floor: f64) -> Result<Vec<Vec<f64>>, LossError> {
    let len = x.len();
    if len < config.window_size {
        return Err(LossError::TooShort { len, needed: config.window_size });
    }
    let frames = config.frame_count(len);
    let window = config.window.coefficients(config.window_size);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(config.fft_size);
    let samples = x.samples();
    let mut buf = vec![Complex::new(0.0, 0.0); config.fft_size];
    let mut out = Vec::with_capacity(frames);
    for f in 0..frames {
        let start = f * config.hop;
        buf.iter_mut().for_each(|c| *c = Complex::new(0.0, 0.0));
        for (j, w) in window.iter().enumerate() {
            buf[j].re = samples[start + j] as f64 * w;
        }
        fft.process(&mut buf);
        out.push(buf[..config.bins()].iter().map(|c| c.norm().max(log_floor).ln()).collect());
    }
    Ok(out)
}
