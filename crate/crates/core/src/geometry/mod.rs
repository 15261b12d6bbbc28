//! Rigid-body poses, pinhole cameras, rig configurations and the rig
//! retargeting chain `G_T_CT = G_T_VS * VS_T_VT * VT_T_CT`.

mod camera;
mod pose;
mod retarget;
pub mod rig_file;
mod trajectory;

use std::path::PathBuf;

pub use camera::{
    project_point, target_camera_pose, target_vehicle_pose, AxisConvention, CameraDef,
    CameraIntrinsics, RigConfig, RigOffset, MIN_PROJECTION_DEPTH,
};
pub use pose::Pose;
pub use retarget::{retarget_trajectory, RetargetedView};
pub use rig_file::{load_rig, parse_rig, save_rig, PoseRecord, RigFile};
pub use trajectory::{
    load_trajectory, parse_trajectory, save_trajectory, subsample_trajectory, trajectory_to_jsonl,
    Trajectory, TrajectoryRecord,
};

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("quaternion {0:?} cannot be normalized")]
    InvalidQuaternion([f64; 4]),
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error("invalid intrinsics: {0}")]
    InvalidIntrinsics(String),
    #[error("rig {0:?} has no cameras")]
    EmptyRig(String),
    #[error("duplicate camera name {0:?}")]
    DuplicateCamera(String),
    #[error("timestamp {t} does not follow {prev}")]
    NonMonotonic { t: f64, prev: f64 },
    #[error("point is behind the camera (z = {z})")]
    BehindCamera { z: f64 },
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
