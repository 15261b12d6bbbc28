//! JSON rig configuration files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AxisConvention, CameraDef, CameraIntrinsics, GeometryError, Pose, RigConfig};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CameraRecord {
    pub name: String,
    pub width: u32,
    pub height: u32,
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub rotation_wxyz: [f64; 4],
    pub translation_xyz_m: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PoseRecord {
    pub rotation_wxyz: [f64; 4],
    pub translation_xyz_m: [f64; 3],
}

impl PoseRecord {
    pub fn to_pose(&self) -> Result<Pose<f64>, GeometryError> {
        Pose::from_wxyz(self.rotation_wxyz, self.translation_xyz_m)
    }
}

impl From<&Pose<f64>> for PoseRecord {
    fn from(p: &Pose<f64>) -> Self {
        Self {
            rotation_wxyz: p.rotation_wxyz(),
            translation_xyz_m: p.translation_xyz(),
        }
    }
}

/// On-disk rig description. `axis_convention` names the camera axes used by
/// the `rotation_wxyz` of each camera.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RigFile {
    pub rig_name: String,
    #[serde(default)]
    pub frame_note: String,
    #[serde(default)]
    pub axis_convention: AxisConvention,
    pub cameras: Vec<CameraRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub virtual_lidar: Option<PoseRecord>,
}

impl RigFile {
    pub fn into_rig(self) -> Result<RigConfig<f64>, GeometryError> {
        let convention = self.axis_convention;
        let cameras = self
            .cameras
            .into_iter()
            .map(|c| {
                let declared = Pose::from_wxyz(c.rotation_wxyz, c.translation_xyz_m)?;
                Ok(CameraDef {
                    intrinsics: CameraIntrinsics::new(c.fx, c.fy, c.cx, c.cy, c.width, c.height)?,
                    extrinsic: convention.to_rdf_extrinsic(&declared),
                    name: c.name,
                })
            })
            .collect::<Result<Vec<_>, GeometryError>>()?;
        let mut rig = RigConfig::new(self.rig_name, cameras, self.frame_note)?;
        if let Some(lidar) = self.virtual_lidar {
            rig = rig.with_lidar_extrinsic(lidar.to_pose()?);
        }
        Ok(rig)
    }

    /// Serializable form of a rig, always in the `rdf` convention.
    pub fn from_rig(rig: &RigConfig<f64>) -> Self {
        Self {
            rig_name: rig.rig_name.clone(),
            frame_note: rig.frame_note.clone(),
            axis_convention: AxisConvention::Rdf,
            cameras: rig
                .cameras
                .iter()
                .map(|c| CameraRecord {
                    name: c.name.clone(),
                    width: c.intrinsics.width,
                    height: c.intrinsics.height,
                    fx: c.intrinsics.fx,
                    fy: c.intrinsics.fy,
                    cx: c.intrinsics.cx,
                    cy: c.intrinsics.cy,
                    rotation_wxyz: c.extrinsic.rotation_wxyz(),
                    translation_xyz_m: c.extrinsic.translation_xyz(),
                })
                .collect(),
            virtual_lidar: Some(PoseRecord::from(&rig.lidar_extrinsic)),
        }
    }
}

pub fn load_rig(path: impl AsRef<Path>) -> Result<RigConfig<f64>, GeometryError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| GeometryError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_rig(&text)
}

pub fn parse_rig(text: &str) -> Result<RigConfig<f64>, GeometryError> {
    let file: RigFile = serde_json::from_str(text)?;
    file.into_rig()
}

pub fn save_rig(rig: &RigConfig<f64>, path: impl AsRef<Path>) -> Result<(), GeometryError> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(&RigFile::from_rig(rig))?;
    std::fs::write(path, text).map_err(|source| GeometryError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const RIG: &str = r#"{
        "rig_name": "test",
        "frame_note": "rear axle on ground",
        "axis_convention": "flu",
        "cameras": [
            {"name": "CAM_FRONT", "width": 64, "height": 48, "fx": 50, "fy": 50,
             "cx": 32, "cy": 24, "rotation_wxyz": [1,0,0,0], "translation_xyz_m": [1.5, 0, 1.6]}
        ],
        "virtual_lidar": {"rotation_wxyz": [1,0,0,0], "translation_xyz_m": [0.9, 0, 1.8]}
    }"#;

    #[test]
    fn parses_and_converts_axes() {
        let rig = parse_rig(RIG).unwrap();
        assert_eq!(rig.len(), 1);
        let cam = &rig.cameras[0];
        // forward axis of the camera points along vehicle +x
        let fwd = cam.extrinsic.transform_vector(&nalgebra::Vector3::z());
        assert!((fwd.x - 1.0).abs() < 1e-12);
        assert_eq!(rig.lidar_extrinsic.translation_xyz(), [0.9, 0.0, 1.8]);
    }

    #[test]
    fn round_trips_through_rdf() {
        let rig = parse_rig(RIG).unwrap();
        let text = serde_json::to_string(&RigFile::from_rig(&rig)).unwrap();
        let back = parse_rig(&text).unwrap();
        let (a, d) = back.cameras[0]
            .extrinsic
            .distance_to(&rig.cameras[0].extrinsic);
        assert!(a < 1e-12 && d < 1e-12);
    }

    #[test]
    fn rejects_duplicate_names() {
        let text = RIG.replace(
            r#""cameras": ["#,
            r#""cameras": [{"name": "CAM_FRONT", "width": 64, "height": 48, "fx": 50, "fy": 50,
             "cx": 32, "cy": 24, "rotation_wxyz": [1,0,0,0], "translation_xyz_m": [0,0,0]},"#,
        );
        assert!(matches!(
            parse_rig(&text),
            Err(GeometryError::DuplicateCamera(_))
        ));
    }
}
