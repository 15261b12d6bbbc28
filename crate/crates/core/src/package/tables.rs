//! Table records, a structural subset of the nuScenes schema.

use serde::{Deserialize, Serialize};

use crate::geometry::RigFile;
use crate::map::BevRange;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub token: String,
    pub logfile: String,
    pub vehicle: String,
    pub date_captured: String,
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneRecord {
    pub token: String,
    pub log_token: String,
    pub nbr_samples: usize,
    pub first_sample_token: String,
    pub last_sample_token: String,
    pub name: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub token: String,
    pub timestamp: i64,
    pub prev: String,
    pub next: String,
    pub scene_token: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleDataRecord {
    pub token: String,
    pub sample_token: String,
    pub ego_pose_token: String,
    pub calibrated_sensor_token: String,
    pub timestamp: i64,
    pub fileformat: String,
    pub is_key_frame: bool,
    pub height: u32,
    pub width: u32,
    pub filename: String,
    pub prev: String,
    pub next: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgoPoseRecord {
    pub token: String,
    pub timestamp: i64,
    pub rotation: [f64; 4],
    pub translation: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratedSensorRecord {
    pub token: String,
    pub sensor_token: String,
    pub translation: [f64; 3],
    pub rotation: [f64; 4],
    /// 3x3 row-major for cameras, empty for the LiDAR.
    pub camera_intrinsic: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorRecord {
    pub token: String,
    pub channel: String,
    pub modality: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapCenter {
    pub channel: String,
    pub rotation: [f64; 4],
    pub translation: [f64; 3],
}

/// Toolkit metadata stored next to the tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub version: String,
    pub seed: u64,
    pub rig: RigFile,
    pub bev_range: BevRange<f64>,
    pub num_points: usize,
    pub ego_axes: String,
    pub map_center: MapCenter,
    pub timestamp_unit: String,
}

pub const LIDAR_CHANNEL: &str = "LIDAR_TOP";
pub const META_FILE: &str = "crossrig_meta.json";

/// Tables that must exist in every dataset.
pub const REQUIRED_TABLES: [&str; 7] = [
    "log",
    "scene",
    "sample",
    "sample_data",
    "ego_pose",
    "calibrated_sensor",
    "sensor",
];

/// Tables written empty; accepted when absent.
pub const OPTIONAL_TABLES: [&str; 6] = [
    "attribute",
    "category",
    "instance",
    "visibility",
    "sample_annotation",
    "map",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Tables {
    pub log: Vec<LogRecord>,
    pub scene: Vec<SceneRecord>,
    pub sample: Vec<SampleRecord>,
    pub sample_data: Vec<SampleDataRecord>,
    pub ego_pose: Vec<EgoPoseRecord>,
    pub calibrated_sensor: Vec<CalibratedSensorRecord>,
    pub sensor: Vec<SensorRecord>,
}
