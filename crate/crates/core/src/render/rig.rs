use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{render, RenderCamera, RenderError};
use crate::geometry::{retarget_trajectory, Pose, RigConfig, RigOffset};
use crate::scene::Scene;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    pub near: f64,
    pub far: f64,
    /// Output resolution override; intrinsics are rescaled to match.
    pub resolution: Option<(u32, u32)>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            near: RenderCamera::<f64>::DEFAULT_NEAR,
            far: RenderCamera::<f64>::DEFAULT_FAR,
            resolution: None,
        }
    }
}

/// One rendered image. `image` is relative to the render directory.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RenderRecord {
    pub frame_index: usize,
    pub t: f64,
    pub camera: String,
    pub image: String,
    pub camera_rotation_wxyz: [f64; 4],
    pub camera_translation_xyz_m: [f64; 3],
    pub vehicle_rotation_wxyz: [f64; 4],
    pub vehicle_translation_xyz_m: [f64; 3],
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl RenderRecord {
    pub fn vehicle_pose(&self) -> Result<Pose<f64>, crate::geometry::GeometryError> {
        Pose::from_wxyz(self.vehicle_rotation_wxyz, self.vehicle_translation_xyz_m)
    }

    pub fn camera_pose(&self) -> Result<Pose<f64>, crate::geometry::GeometryError> {
        Pose::from_wxyz(self.camera_rotation_wxyz, self.camera_translation_xyz_m)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RenderManifest {
    pub rows: Vec<RenderRecord>,
}

pub const MANIFEST_FILE: &str = "manifest.jsonl";

impl RenderManifest {
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&serde_json::to_string(r).expect("serializable record"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, RenderError> {
        let rows = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<Vec<RenderRecord>, _>>()?;
        Ok(Self { rows })
    }

    pub fn load(dir: &Path) -> Result<Self, RenderError> {
        let path = dir.join(MANIFEST_FILE);
        let text =
            std::fs::read_to_string(&path).map_err(|source| RenderError::Io { path, source })?;
        Self::from_jsonl(&text)
    }

    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            a.frame_index
                .cmp(&b.frame_index)
                .then_with(|| a.camera.cmp(&b.camera))
        });
    }
}

/// Relative image path of one view.
pub fn image_path(camera: &str, frame_index: usize) -> String {
    format!("{camera}/{frame_index:06}.png")
}

/// Renders every camera of `target_rig` at every source vehicle pose into
/// `out_dir/<CAMERA>/<frame>.png` and writes `out_dir/manifest.jsonl`.
pub fn render_rig(
    scene: &Scene<f64>,
    source_vehicle_poses: &[(f64, Pose<f64>)],
    offset: &RigOffset<f64>,
    target_rig: &RigConfig<f64>,
    out_dir: &Path,
    options: &RenderOptions,
) -> Result<RenderManifest, RenderError> {
    target_rig.validate()?;
    let io = |path: PathBuf| move |source| RenderError::Io { path, source };
    for cam in &target_rig.cameras {
        let dir = out_dir.join(&cam.name);
        std::fs::create_dir_all(&dir).map_err(io(dir.clone()))?;
    }
    let views = retarget_trajectory(source_vehicle_poses, offset, target_rig);
    let mut rows = views
        .par_iter()
        .map(|view| {
            let intrinsics = match options.resolution {
                Some((w, h)) => view.intrinsics.resized(w, h)?,
                None => view.intrinsics,
            };
            let cam = RenderCamera::new(view.camera_pose, intrinsics)
                .with_clip(options.near, options.far)?;
            let gaussians = scene.flatten_at(view.t);
            let fb = render(&gaussians, &cam, &scene.sky);
            let rel = image_path(&view.camera, view.frame_index);
            fb.write_png(&out_dir.join(&rel))?;
            Ok(RenderRecord {
                frame_index: view.frame_index,
                t: view.t,
                camera: view.camera.clone(),
                image: rel,
                camera_rotation_wxyz: view.camera_pose.rotation_wxyz(),
                camera_translation_xyz_m: view.camera_pose.translation_xyz(),
                vehicle_rotation_wxyz: view.vehicle_pose.rotation_wxyz(),
                vehicle_translation_xyz_m: view.vehicle_pose.translation_xyz(),
                fx: intrinsics.fx,
                fy: intrinsics.fy,
                cx: intrinsics.cx,
                cy: intrinsics.cy,
                width: intrinsics.width,
                height: intrinsics.height,
            })
        })
        .collect::<Result<Vec<_>, RenderError>>()?;
    // rig order within a frame
    rows.sort_by_key(|r| {
        (
            r.frame_index,
            target_rig.cameras.iter().position(|c| c.name == r.camera),
        )
    });
    let manifest = RenderManifest { rows };
    let path = out_dir.join(MANIFEST_FILE);
    std::fs::write(&path, manifest.to_jsonl()).map_err(io(path.clone()))?;
    Ok(manifest)
}
