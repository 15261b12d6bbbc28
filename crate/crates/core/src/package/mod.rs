//! nuScenes-format dataset packaging and validation.

mod labels;
mod tables;
mod token;
mod validate;
mod writer;

use std::path::PathBuf;

pub use labels::{eval_samples, ground_truth_as_predictions, load_ground_truth};
pub use tables::*;
pub use token::{is_valid_token, TokenGen};
pub use validate::{
    find_version_dir, validate, validate_tables, ValidationReport, Violation, ViolationKind,
};
pub use writer::{
    frames_from_render_manifest, package, DatasetManifest, FrameInput, PackageOptions,
    SampleSummary, SceneInput, SceneSummary,
};

#[derive(Debug, thiserror::Error)]
pub enum PackageError {
    #[error("scene {scene:?} frame {frame}: no image for camera {camera}")]
    MissingImage {
        scene: String,
        frame: usize,
        camera: String,
    },
    #[error("scene name {0:?} used twice")]
    DuplicateScene(String),
    #[error("{0} holds no v1.0-* table directory")]
    NotADataset(PathBuf),
    #[error("no map labels for sample {0}")]
    MissingLabels(String),
    #[error("predictions name unknown sample {0:?}")]
    UnknownSample(String),
    #[error("packaged dataset failed validation ({} violations)", .0.len())]
    Inconsistent(Vec<Violation>),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Map(#[from] crate::map::MapError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
