//! Mono RIFF/WAVE, 16-bit PCM or 32-bit IEEE float.
//!
//! Writing always produces the canonical 44-byte header (RIFF, a 16-byte
//! `fmt ` chunk, `data`). Reading walks the chunk list, so files with extra
//! chunks or an extensible `fmt ` are accepted as long as the payload is one
//! of the two supported encodings.

use super::AudioIoError;
use crate::buffer::SampleBuffer;
use std::path::Path;

const FORMAT_PCM: u16 = 1;
const FORMAT_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavFormat {
    Pcm16,
    Float32,
}

impl WavFormat {
    fn tag(self) -> u16 {
        match self {
            WavFormat::Pcm16 => FORMAT_PCM,
            WavFormat::Float32 => FORMAT_FLOAT,
        }
    }

    fn bits(self) -> u16 {
        match self {
            WavFormat::Pcm16 => 16,
            WavFormat::Float32 => 32,
        }
    }
}

fn pcm16_from_f32(s: f32) -> i16 {
    (s as f64 * 32768.0).round().clamp(-32768.0, 32767.0) as i16
}

pub fn encode_wav(buffer: &SampleBuffer, format: WavFormat) -> Result<Vec<u8>, AudioIoError> {
    let rate = buffer.sample_rate();
    if rate.fract() != 0.0 || rate < 1.0 || rate > u32::MAX as f64 {
        return Err(AudioIoError::UnsupportedFormat(format!("sample rate {rate} is not a positive integer")));
    }
    let rate = rate as u32;
    let bytes_per_sample = (format.bits() / 8) as u32;
    let data_len = buffer.len() as u64 * bytes_per_sample as u64;
    if data_len + 36 > u32::MAX as u64 {
        return Err(AudioIoError::UnsupportedFormat("data exceeds 4 GiB".into()));
    }
    let data_len = data_len as u32;

    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&format.tag().to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&rate.to_le_bytes());
    out.extend_from_slice(&(rate * bytes_per_sample).to_le_bytes());
    out.extend_from_slice(&(bytes_per_sample as u16).to_le_bytes());
    out.extend_from_slice(&format.bits().to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    match format {
        WavFormat::Float32 => buffer.samples().iter().for_each(|s| out.extend_from_slice(&s.to_le_bytes())),
        WavFormat::Pcm16 => buffer
            .samples()
            .iter()
            .for_each(|&s| out.extend_from_slice(&pcm16_from_f32(s).to_le_bytes())),
    }
    Ok(out)
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

struct FmtChunk {
    tag: u16,
    channels: u16,
    rate: u32,
    bits: u16,
}

pub fn decode_wav(bytes: &[u8]) -> Result<SampleBuffer, AudioIoError> {
    let corrupt = |m: &str| AudioIoError::CorruptHeader(m.to_string());
    if bytes.len() < 12 {
        return Err(corrupt("shorter than a RIFF header"));
    }
    if &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(corrupt("missing RIFF/WAVE signature"));
    }

    let mut pos = 12;
    let mut fmt: Option<FmtChunk> = None;
    let mut data: Option<&[u8]> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body_start = pos + 8;
        let body_end = body_start.checked_add(size).ok_or_else(|| corrupt("chunk size overflow"))?;
        if id == b"data" {
            if body_end > bytes.len() {
                return Err(corrupt("data chunk extends past end of file"));
            }
            data = Some(&bytes[body_start..body_end]);
        } else if id == b"fmt " {
            if size < 16 || body_end > bytes.len() {
                return Err(corrupt("fmt chunk truncated"));
            }
            let b = &bytes[body_start..body_end];
            let mut tag = u16_at(b, 0);
            if tag == FORMAT_EXTENSIBLE {
                if size < 40 {
                    return Err(corrupt("extensible fmt chunk truncated"));
                }
                // first two bytes of the sub-format GUID carry the real tag
                tag = u16_at(b, 24);
            }
            fmt = Some(FmtChunk { tag, channels: u16_at(b, 2), rate: u32_at(b, 4), bits: u16_at(b, 14) });
        }
        if body_end > bytes.len() {
            break;
        }
        // chunks are word aligned
        pos = body_end + (size & 1);
    }

    let fmt = fmt.ok_or_else(|| corrupt("no fmt chunk"))?;
    let data = data.ok_or_else(|| corrupt("no data chunk"))?;
    if fmt.channels != 1 {
        return Err(AudioIoError::UnsupportedFormat(format!("{} channels (mono only)", fmt.channels)));
    }
    if fmt.rate == 0 {
        return Err(corrupt("zero sample rate"));
    }
    let samples: Vec<f32> = match (fmt.tag, fmt.bits) {
        (FORMAT_PCM, 16) => data
            .chunks_exact(2)
            .map(|c| i16::from_le_bytes([c[0], c[1]]) as f32 / 32768.0)
            .collect(),
        (FORMAT_FLOAT, 32) => data
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect(),
        (tag, bits) => {
            return Err(AudioIoError::UnsupportedFormat(format!("format tag {tag} with {bits} bits per sample")))
        }
    };
    SampleBuffer::new(samples, fmt.rate as f64)
        .map_err(|e| AudioIoError::UnsupportedFormat(format!("sample data: {e}")))
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<SampleBuffer, AudioIoError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| AudioIoError::from_io(path, e))?;
    decode_wav(&bytes)
}

pub fn write_wav(buffer: &SampleBuffer, path: impl AsRef<Path>, format: WavFormat) -> Result<(), AudioIoError> {
    let path = path.as_ref();
    let bytes = encode_wav(buffer, format)?;
    std::fs::write(path, bytes).map_err(|e| AudioIoError::from_io(path, e))
}
