//! Band-limited subtractive excitation synthesis and its measurement tools.
//!
//! The pipeline runs frame-rate parameters ([`SynthParams`]) through a
//! phase-accumulated sawtooth with PolyBLEP wrap correction, a per-frame
//! zero-phase FIR envelope, and a soft voicing gate, then adds filtered
//! noise. Alongside it sit the spectral, F0 and voicing losses, and an alias
//! analyzer that compares renders against an additive band-limited sawtooth.

pub mod analysis;
pub mod buffer;
pub mod io;
pub mod losses;
pub mod oscillator;
pub mod synth;
pub mod window;

pub use analysis::{alias_report, compare_oscillators, AliasReport, ComparisonRow};
pub use buffer::{AudioBuffer, BufferError, SampleBuffer};
pub use io::{read_params, read_wav, write_params, write_wav, AudioIoError, WavFormat};
pub use losses::{LossError, LossReport, StftConfig, StftSet};
pub use oscillator::{
    accumulate_phase, naive_saw, polyblep_residual, polyblep_saw, Oscillator, OscillatorError, PhaseTrack,
};
pub use synth::{synthesize, synthesize_with, F0Contour, SynthError, SynthParams};
pub use window::Window;
