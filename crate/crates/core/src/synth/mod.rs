//! Deterministic synthetic roadside scenes and detector noise.
//!
//! All randomness comes from ChaCha8 keyed by the 64-bit seed and a domain
//! tag, with one stream per `(frame, object)` pair: stream id
//! `frame << 32 | object`. Each object's draws are therefore independent of
//! how many objects precede it, and frames can be generated in any order or
//! in parallel with identical results.

mod config;
mod noise;
mod scene;
mod stats;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use config::{CameraRanges, DepthPrior, NoiseModel, SceneConfig, SizePrior};
pub use noise::{perturb, Perturbed};
pub use scene::{generate_scene, image_box, Scene, SceneFrame};
pub use stats::{scene_statistics, SceneStatistics, DEPTH_BIN_WIDTH};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("no frames to summarize")]
    EmptyInput,
}

/// Stream for object `object` of frame `frame` in domain `tag`.
pub(crate) fn stream(seed: u64, tag: &[u8], frame: usize, object: u32) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    let n = tag.len().min(24);
    key[8..8 + n].copy_from_slice(&tag[..n]);
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(((frame as u64) << 32) | u64::from(object));
    rng
}

/// Stream index reserved for per-frame draws.
pub(crate) const FRAME_STREAM: u32 = u32::MAX;

/// Frame ids are zero-padded indices so lexicographic and numeric order agree.
pub fn frame_id(index: usize) -> String {
    format!("{index:06}")
}
