//! JSON parameter files.
//!
//! ```json
//! { "schema_version": 1, "sample_rate": 16000, "hop": 256, "fft_size": 512,
//!   "seed": 0, "frames": [ { "f0": 200.0, "voicing": 1.0,
//!   "harmonic_env": [..], "noise_mag": [..] } ] }
//! ```

use super::AudioIoError;
use crate::synth::{F0Contour, SynthError, SynthParams};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamFile {
    schema_version: u64,
    sample_rate: f64,
    hop: usize,
    fft_size: usize,
    seed: u64,
    frames: Vec<Frame>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Frame {
    f0: f64,
    voicing: f64,
    harmonic_env: Vec<f64>,
    noise_mag: Vec<f64>,
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: Option<serde_json::Value>,
}

fn schema(path: impl Into<String>, reason: impl Into<String>) -> AudioIoError {
    AudioIoError::SchemaViolation { path: path.into(), reason: reason.into() }
}

fn from_synth(e: SynthError) -> AudioIoError {
    match e {
        SynthError::Invalid { field, reason } => schema(field, reason),
        SynthError::EmptyInput => schema("frames", "at least one frame is required"),
        SynthError::BadHop { hop, fft_size } => schema("hop", format!("{hop} exceeds fft_size {fft_size}")),
        SynthError::EmptyEnvelope => schema("frames[0].harmonic_env", "must not be empty"),
        SynthError::LengthMismatch { left, right } => schema("frames", format!("length mismatch {left} vs {right}")),
        other => schema("<document>", other.to_string()),
    }
}

/// Parses and fully validates a parameter document.
pub fn params_from_json(text: &str) -> Result<SynthParams, AudioIoError> {
    // check the version first so a future layout reports the right error
    let probe: VersionProbe =
        serde_json::from_str(text).map_err(|e| schema("<document>", e.to_string()))?;
    match probe.schema_version {
        None => return Err(schema("schema_version", "missing")),
        Some(v) => match v.as_u64() {
            Some(SCHEMA_VERSION) => {}
            Some(found) => return Err(AudioIoError::VersionMismatch { found, expected: SCHEMA_VERSION }),
            None => return Err(schema("schema_version", format!("expected an integer, got {v}"))),
        },
    }
    let file: ParamFile = serde_json::from_str(text).map_err(|e| schema("<document>", e.to_string()))?;

    let mut f0 = Vec::with_capacity(file.frames.len());
    let mut voicing = Vec::with_capacity(file.frames.len());
    let mut env = Vec::with_capacity(file.frames.len());
    let mut noise = Vec::with_capacity(file.frames.len());
    for frame in file.frames {
        f0.push(frame.f0);
        voicing.push(frame.voicing);
        env.push(frame.harmonic_env);
        noise.push(frame.noise_mag);
    }
    let contour = F0Contour::new(f0, voicing, file.hop, file.sample_rate).map_err(from_synth)?;
    SynthParams::new(contour, env, noise, file.fft_size, file.seed).map_err(from_synth)
}

pub fn params_to_json(params: &SynthParams) -> String {
    let c = params.contour();
    let file = ParamFile {
        schema_version: SCHEMA_VERSION,
        sample_rate: params.sample_rate(),
        hop: params.hop(),
        fft_size: params.fft_size(),
        seed: params.seed(),
        frames: (0..params.frame_count())
            .map(|i| Frame {
                f0: c.f0()[i],
                voicing: c.voicing()[i],
                harmonic_env: params.harmonic_env()[i].clone(),
                noise_mag: params.noise_mag()[i].clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("parameter file serializes")
}

pub fn read_params(path: impl AsRef<Path>) -> Result<SynthParams, AudioIoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| AudioIoError::from_io(path, e))?;
    params_from_json(&text)
}

pub fn write_params(params: &SynthParams, path: impl AsRef<Path>) -> Result<(), AudioIoError> {
    let path = path.as_ref();
    let mut text = params_to_json(params);
    text.push('\n');
    std::fs::write(path, text).map_err(|e| AudioIoError::from_io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::synthesize;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn minimal(f0: &str, version: u64) -> String {
        format!(
            r#"{{"schema_version": {version}, "sample_rate": 16000, "hop": 4, "fft_size": 8, "seed": 3,
               "frames": [{{"f0": {f0}, "voicing": 0.0, "harmonic_env": [0, 0], "noise_mag": [0, 0, 0, 0, 0]}}]}}"#
        )
    }

    #[test]
    fn minimal_file_renders_silence() {
        let p = params_from_json(&minimal("100", 1)).unwrap();
        assert_eq!(p.frame_count(), 1);
        assert_eq!(p.seed(), 3);
        let out = synthesize(&p).unwrap();
        assert_eq!(out.len(), 4);
        assert!(out.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn negative_f0_names_the_frame() {
        match params_from_json(&minimal("-5", 1)) {
            Err(AudioIoError::SchemaViolation { path, .. }) => assert_eq!(path, "frames[0].f0"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn version_and_shape_errors() {
        assert!(matches!(
            params_from_json(&minimal("100", 2)),
            Err(AudioIoError::VersionMismatch { found: 2, expected: 1 })
        ));
        assert!(matches!(params_from_json("{}"), Err(AudioIoError::SchemaViolation { .. })));
        assert!(matches!(params_from_json("not json"), Err(AudioIoError::SchemaViolation { .. })));
        let bad_bins = minimal("100", 1).replace("[0, 0, 0, 0, 0]", "[0, 0]");
        match params_from_json(&bad_bins) {
            Err(AudioIoError::SchemaViolation { path, .. }) => assert_eq!(path, "frames[0].noise_mag"),
            other => panic!("{other:?}"),
        }
        let extra = minimal("100", 1).replace("\"seed\": 3", "\"seed\": 3, \"gain\": 2");
        assert!(matches!(params_from_json(&extra), Err(AudioIoError::SchemaViolation { .. })));
    }

    #[test]
    fn roundtrip_random_params() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let frames = 100;
        let contour = F0Contour::new(
            (0..frames).map(|_| rng.gen_range(0.0..8000.0)).collect(),
            (0..frames).map(|_| rng.gen_range(0.0..=1.0)).collect(),
            256,
            16000.0,
        )
        .unwrap();
        let env: Vec<Vec<f64>> = (0..frames).map(|_| (0..65).map(|_| rng.gen_range(0.0..3.0)).collect()).collect();
        let noise: Vec<Vec<f64>> = (0..frames).map(|_| (0..257).map(|_| rng.gen::<f64>()).collect()).collect();
        let p = SynthParams::new(contour, env, noise, 512, u64::MAX).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        write_params(&p, &path).unwrap();
        let back = read_params(&path).unwrap();
        assert_eq!(back.frame_count(), p.frame_count());
        assert_eq!(back.seed(), p.seed());
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        for i in 0..frames {
            assert!(close(back.contour().f0()[i], p.contour().f0()[i]));
            assert!(close(back.contour().voicing()[i], p.contour().voicing()[i]));
            assert_eq!(back.harmonic_env()[i].len(), 65);
            for (a, b) in back.harmonic_env()[i].iter().zip(&p.harmonic_env()[i]) {
                assert!(close(*a, *b));
            }
            for (a, b) in back.noise_mag()[i].iter().zip(&p.noise_mag()[i]) {
                assert!(close(*a, *b));
            }
        }
    }
}
