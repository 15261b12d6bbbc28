//! Vector map labels: elements, frame changes, range clipping and
//! fixed-count resampling.

mod clip;
mod element;
pub mod io;
mod resample;
mod transform;

use std::path::PathBuf;

pub use clip::clip_to_range;
pub use element::{BevRange, Frame, MapClass, MapElement, MapLayer};
pub use io::{load_map, save_map, ElementRecord, MapFile};
pub use resample::{cumulative_lengths, resample, MIN_ARC_LENGTH};
pub use transform::{ego_to_world, world_to_ego};

use crate::geometry::Pose;
use crate::scalar::Real;

/// Default number of points per element.
pub const DEFAULT_NUM_POINTS: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum MapError {
    #[error("map element needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("non-finite map coordinate")]
    NonFinite,
    #[error("expected {expected:?} frame, found {found:?}")]
    WrongFrame { expected: Frame, found: Frame },
    #[error("element arc length {length} m is too short to resample")]
    Degenerate { length: f64 },
    #[error("resample count must be at least 2, got {0}")]
    InvalidCount(usize),
    #[error("BEV range must satisfy min < max on both axes")]
    InvalidRange,
    #[error("ego frame is perpendicular to the ground plane")]
    DegeneratePose,
    #[error("unknown map class {0:?}")]
    UnknownClass(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("map file: {0}")]
    Json(#[from] serde_json::Error),
}

/// World labels to ego-frame labels ready for training or evaluation:
/// transformed, clipped to `range`, and resampled to `n_p` points. Elements
/// too short to resample after clipping are dropped.
pub fn ego_labels<T: Real>(
    world: &MapLayer<T>,
    ego_pose: &Pose<T>,
    range: &BevRange<T>,
    n_p: usize,
) -> Result<MapLayer<T>, MapError> {
    let clipped = clip_to_range(&world_to_ego(world, ego_pose)?, range)?;
    let mut elements = Vec::with_capacity(clipped.elements.len());
    for e in &clipped.elements {
        match resample(e, n_p) {
            Ok(r) => elements.push(r),
            Err(MapError::Degenerate { .. }) => continue,
            Err(other) => return Err(other),
        }
    }
    Ok(MapLayer {
        frame: Frame::Ego,
        elements,
    })
}
