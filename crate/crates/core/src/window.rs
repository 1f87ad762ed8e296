use std::f64::consts::PI;

/// Analysis taper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    Rectangular,
    /// Periodic Hann (`0.5 - 0.5 cos(2 pi j / len)`).
    #[default]
    Hann,
}

impl Window {
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; len],
            Window::Hann => (0..len)
                .map(|j| 0.5 - 0.5 * (2.0 * PI * j as f64 / len as f64).cos())
                .collect(),
        }
    }
}
