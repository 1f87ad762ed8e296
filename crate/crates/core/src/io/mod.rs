//! WAV and synthesis-parameter persistence.

mod params;
mod wav;

pub use params::{read_params, write_params, params_from_json, params_to_json, SCHEMA_VERSION};
pub use wav::{decode_wav, encode_wav, read_wav, write_wav, WavFormat};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AudioIoError {
    #[error("file not found: {0}")]
    NotFound(String),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt header: {0}")]
    CorruptHeader(String),
    #[error("schema violation at `{path}`: {reason}")]
    SchemaViolation { path: String, reason: String },
    #[error("schema version {found} not supported (expected {expected})")]
    VersionMismatch { found: u64, expected: u64 },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl AudioIoError {
    /// True for errors caused by file contents rather than the filesystem.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            AudioIoError::UnsupportedFormat(_)
                | AudioIoError::CorruptHeader(_)
                | AudioIoError::SchemaViolation { .. }
                | AudioIoError::VersionMismatch { .. }
        )
    }

    pub(crate) fn from_io(path: &std::path::Path, source: std::io::Error) -> Self {
        if source.kind() == std::io::ErrorKind::NotFound {
            AudioIoError::NotFound(path.display().to_string())
        } else {
            AudioIoError::Io { path: path.display().to_string(), source }
        }
    }
}
