//! Checkpoint format: text header, little-endian fixed-width binary
//! state, trailing FNV-1a checksum. Loading verifies version, config
//! hash, payload sizes and checksum before any state is applied.

use std::path::Path;

use crate::hash::Fnv64;
use crate::network::N_INPUT;

const HEADER: &str = "dwsnn-checkpoint v1";
const HEADER_END: &str = "end-header";

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("not a checkpoint: expected {HEADER:?}, found {found:?}")]
    VersionMismatch { found: String },
    #[error("config hash mismatch: checkpoint {stored:016x}, current config {current:016x}")]
    ConfigHashMismatch { stored: u64, current: u64 },
    #[error("checkpoint corrupted: checksum {computed:016x} != stored {stored:016x}")]
    ChecksumMismatch { computed: u64, stored: u64 },
    #[error("checkpoint header line {line:?} malformed")]
    BadHeaderLine { line: String },
    #[error("checkpoint header missing key {key}")]
    MissingKey { key: &'static str },
    #[error("checkpoint payload has {available} bytes, expected {expected}")]
    ShortPayload { expected: usize, available: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Persistent training state.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub config_hash: u64,
    /// Completed training epochs.
    pub epoch: u32,
    /// Global image-presentation ordinal (PRNG stream position).
    pub images_seen: u64,
    pub seed: u64,
    pub n_exc: usize,
    /// Wall positions (m), line-major 784×n_exc.
    pub positions: Vec<f64>,
    /// Excitatory-layer adaptation variables.
    pub adaptations: Vec<f64>,
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(64 + 8 * (self.positions.len() + self.adaptations.len()));
        out.extend_from_slice(
            format!(
                "{HEADER}\nconfig_hash = {:016x}\nepoch = {}\nimages_seen = {}\nseed = {}\nn_input = {}\nn_exc = {}\n{HEADER_END}\n",
                self.config_hash, self.epoch, self.images_seen, self.seed, N_INPUT, self.n_exc
            )
            .as_bytes(),
        );
        for v in &self.positions {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in &self.adaptations {
            out.extend_from_slice(&v.to_le_bytes());
        }
        let mut h = Fnv64::new();
        h.update(&out);
        out.extend_from_slice(&h.finish().to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8], current_config_hash: u64) -> Result<Self, CheckpointError> {
        // checksum covers everything before the trailing u64
        if bytes.len() < 8 {
            return Err(CheckpointError::ShortPayload {
                expected: 8,
                available: bytes.len(),
            });
        }
        let (body, tail) = bytes.split_at(bytes.len() - 8);
        let stored = u64::from_le_bytes(tail.try_into().expect("8-byte tail"));
        let mut h = Fnv64::new();
        h.update(body);
        let computed = h.finish();
        if computed != stored {
            return Err(CheckpointError::ChecksumMismatch { computed, stored });
        }

        // text header up to the end marker
        let mut pos = 0usize;
        let mut lines = Vec::new();
        loop {
            let rest = &body[pos..];
            let nl = rest
                .iter()
                .position(|&b| b == b'\n')
                .ok_or_else(|| CheckpointError::BadHeaderLine {
                    line: String::from_utf8_lossy(rest).into_owned(),
                })?;
            let line = String::from_utf8_lossy(&rest[..nl]).into_owned();
            pos += nl + 1;
            if line == HEADER_END {
                break;
            }
            lines.push(line);
            if lines.len() > 16 {
                return Err(CheckpointError::BadHeaderLine {
                    line: "header end marker not found".into(),
                });
            }
        }
        if lines.first().map(String::as_str) != Some(HEADER) {
            return Err(CheckpointError::VersionMismatch {
                found: lines.first().cloned().unwrap_or_default(),
            });
        }
        let mut config_hash = None;
        let mut epoch = None;
        let mut images_seen = None;
        let mut seed = None;
        let mut n_exc = None;
        for line in &lines[1..] {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CheckpointError::BadHeaderLine { line: line.clone() })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || CheckpointError::BadHeaderLine { line: line.clone() };
            match key {
                "config_hash" => {
                    config_hash = Some(u64::from_str_radix(value, 16).map_err(|_| bad())?)
                }
                "epoch" => epoch = Some(value.parse().map_err(|_| bad())?),
                "images_seen" => images_seen = Some(value.parse().map_err(|_| bad())?),
                "seed" => seed = Some(value.parse().map_err(|_| bad())?),
                "n_input" => {
                    let n: usize = value.parse().map_err(|_| bad())?;
                    if n != N_INPUT {
                        return Err(bad());
                    }
                }
                "n_exc" => n_exc = Some(value.parse().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        let config_hash =
            config_hash.ok_or(CheckpointError::MissingKey { key: "config_hash" })?;
        if config_hash != current_config_hash {
            return Err(CheckpointError::ConfigHashMismatch {
                stored: config_hash,
                current: current_config_hash,
            });
        }
        let epoch = epoch.ok_or(CheckpointError::MissingKey { key: "epoch" })?;
        let images_seen =
            images_seen.ok_or(CheckpointError::MissingKey { key: "images_seen" })?;
        let seed = seed.ok_or(CheckpointError::MissingKey { key: "seed" })?;
        let n_exc: usize = n_exc.ok_or(CheckpointError::MissingKey { key: "n_exc" })?;

        let n_pos = N_INPUT * n_exc;
        let expected = 8 * (n_pos + n_exc);
        let available = body.len() - pos;
        if available != expected {
            return Err(CheckpointError::ShortPayload {
                expected,
                available,
            });
        }
        let read_f64 = |at: usize| {
            f64::from_le_bytes(body[at..at + 8].try_into().expect("8-byte field"))
        };
        let positions = (0..n_pos).map(|i| read_f64(pos + 8 * i)).collect();
        let base = pos + 8 * n_pos;
        let adaptations = (0..n_exc).map(|i| read_f64(base + 8 * i)).collect();
        Ok(Self {
            config_hash,
            epoch,
            images_seen,
            seed,
            n_exc,
            positions,
            adaptations,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path, current_config_hash: u64) -> Result<Self, CheckpointError> {
        let bytes = std::fs::read(path)?;
        Self::from_bytes(&bytes, current_config_hash)
    }
}
