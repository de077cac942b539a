//! Dataset ingestion, weight-map emission, checkpoints and run config.

pub mod checkpoint;
pub mod config;
pub mod idx;
pub mod pgm;

pub use checkpoint::{Checkpoint, CheckpointError};
pub use config::{ConfigError, RunConfig};
pub use idx::{parse_idx, parse_images, parse_labels, IdxError, IdxTensor, ImageSet};
pub use pgm::{emit_weight_maps, montage, parse_pgm, weight_map, GrayImage, PgmError};
