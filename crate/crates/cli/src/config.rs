//! Pipeline configuration: one JSON document, optionally patched by
//! `--dotted.key value` flags.

use std::path::{Path, PathBuf};

use crossrig::eval::{ApMode, Pooling, DEFAULT_THRESHOLDS};
use crossrig::geometry::PoseRecord;
use crossrig::map::{BevRange, DEFAULT_NUM_POINTS};
use crossrig::scene::DEFAULT_SKY;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub background: Option<PathBuf>,
    pub tracks: Option<PathBuf>,
    pub objects_dir: Option<PathBuf>,
    pub source_rig: Option<PathBuf>,
    pub target_rig: Option<PathBuf>,
    pub trajectory: Option<PathBuf>,
    pub map: Option<PathBuf>,
    pub masks_dir: Option<PathBuf>,
    pub output: PathBuf,
    pub predictions: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderSettings {
    pub width: Option<u32>,
    pub height: Option<u32>,
    pub sky_color: [f64; 3],
    pub near: f64,
    pub far: f64,
}

impl Default for RenderSettings {
    fn default() -> Self {
        Self {
            width: None,
            height: None,
            sky_color: DEFAULT_SKY,
            near: 0.2,
            far: 1000.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: Paths,
    /// Source-vehicle-to-target-vehicle transform.
    pub rig_offset: PoseRecord,
    pub render: RenderSettings,
    pub bev_range: BevRange<f64>,
    pub num_points: usize,
    pub thresholds: Vec<f64>,
    pub ap_mode: ApMode,
    pub pooling: Pooling,
    pub seed: u64,
    pub dataset_name: String,
    pub scene_name: String,
    /// Sample cadence; `null` keeps every trajectory pose.
    pub keyframe_hz: Option<f64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            paths: Paths {
                output: PathBuf::from("out"),
                ..Paths::default()
            },
            rig_offset: PoseRecord {
                rotation_wxyz: [1.0, 0.0, 0.0, 0.0],
                translation_xyz_m: [0.0; 3],
            },
            render: RenderSettings::default(),
            bev_range: BevRange::default(),
            num_points: DEFAULT_NUM_POINTS,
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
            ap_mode: ApMode::default(),
            pooling: Pooling::default(),
            seed: 0,
            dataset_name: "crossrig".into(),
            scene_name: "scene-0001".into(),
            keyframe_hz: Some(2.0),
        }
    }
}

/// Parses a flag value as JSON, falling back to a plain string.
fn flag_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

/// Sets `key` (dot-separated) in `doc`, creating intermediate objects.
pub fn apply_override(doc: &mut Value, key: &str, raw: &str) -> Result<(), CliError> {
    let mut cur = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(CliError::Config(format!("bad override key {key:?}")));
        }
        let obj = cur.as_object_mut().ok_or_else(|| {
            CliError::Config(format!(
                "override {key:?}: {} is not an object",
                parts[..i].join(".")
            ))
        })?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), flag_value(raw));
            return Ok(());
        }
        cur = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

impl PipelineConfig {
    /// Loads `path`, applies overrides and resolves relative paths against
    /// the config file's directory.
    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => {
                CliError::Config(format!("config {} not found", path.display()))
            }
            _ => CliError::io(path, e),
        })?;
        let mut doc: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        for (k, v) in overrides {
            apply_override(&mut doc, k, v)?;
        }
        let mut cfg: PipelineConfig = serde_json::from_value(doc)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve(base);
        cfg.check()?;
        Ok(cfg)
    }

    fn resolve(&mut self, base: &Path) {
        let p = &mut self.paths;
        for slot in [
            &mut p.background,
            &mut p.tracks,
            &mut p.objects_dir,
            &mut p.source_rig,
            &mut p.target_rig,
            &mut p.trajectory,
            &mut p.map,
            &mut p.masks_dir,
            &mut p.predictions,
            &mut p.dataset,
        ] {
            if let Some(v) = slot.as_mut() {
                *v = base.join(&*v);
            }
        }
        p.output = base.join(&p.output);
    }

    pub fn check(&self) -> Result<(), CliError> {
        if self.thresholds.is_empty() || self.thresholds.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CliError::Config(
                "thresholds must be non-empty and strictly increasing".into(),
            ));
        }
        if self.thresholds.iter().any(|&t| !(t > 0.0)) {
            return Err(CliError::Config("thresholds must be positive".into()));
        }
        if self.num_points < 2 {
            return Err(CliError::Config("num_points must be at least 2".into()));
        }
        if let Some(hz) = self.keyframe_hz {
            if !(hz > 0.0 && hz.is_finite()) {
                return Err(CliError::Config("keyframe_hz must be positive".into()));
            }
        }
        if self.render.width.is_some() != self.render.height.is_some() {
            return Err(CliError::Config(
                "render.width and render.height go together".into(),
            ));
        }
        BevRange::new(
            self.bev_range.x_min,
            self.bev_range.x_max,
            self.bev_range.y_min,
            self.bev_range.y_max,
        )
        .map_err(|e| CliError::Config(format!("bev_range: {e}")))?;
        let p = &self.paths;
        for (name, slot) in [
            ("background", &p.background),
            ("tracks", &p.tracks),
            ("source_rig", &p.source_rig),
            ("target_rig", &p.target_rig),
            ("trajectory", &p.trajectory),
            ("map", &p.map),
            ("predictions", &p.predictions),
        ] {
            if let Some(path) = slot {
                if !path.is_file() {
                    return Err(CliError::Config(format!(
                        "paths.{name}: {} does not exist",
                        path.display()
                    )));
                }
            }
        }
        for (name, slot) in [("objects_dir", &p.objects_dir), ("masks_dir", &p.masks_dir)] {
            if let Some(path) = slot {
                if !path.is_dir() {
                    return Err(CliError::Config(format!(
                        "paths.{name}: {} is not a directory",
                        path.display()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn require<'a>(&self, name: &str, slot: &'a Option<PathBuf>) -> Result<&'a Path, CliError> {
        slot.as_deref()
            .ok_or_else(|| CliError::Config(format!("paths.{name} is required for this command")))
    }

    pub fn poses_path(&self) -> PathBuf {
        self.paths.output.join("poses.jsonl")
    }

    pub fn render_dir(&self) -> PathBuf {
        self.paths.output.join("render")
    }

    pub fn dataset_dir(&self) -> PathBuf {
        self.paths
            .dataset
            .clone()
            .unwrap_or_else(|| self.paths.output.join("dataset"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn overrides_create_nested_keys() {
        let mut doc = json!({"render": {"width": 10}});
        apply_override(&mut doc, "render.width", "320").unwrap();
        apply_override(&mut doc, "paths.output", "runs/a").unwrap();
        apply_override(&mut doc, "thresholds", "[0.5, 1.0]").unwrap();
        assert_eq!(doc["render"]["width"], json!(320));
        assert_eq!(doc["paths"]["output"], json!("runs/a"));
        assert_eq!(doc["thresholds"], json!([0.5, 1.0]));
    }

    #[test]
    fn override_through_scalar_fails() {
        let mut doc = json!({"seed": 3});
        assert!(matches!(
            apply_override(&mut doc, "seed.x", "1"),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn rejects_unsorted_thresholds() {
        let cfg = PipelineConfig {
            thresholds: vec![1.0, 0.5],
            ..PipelineConfig::default()
        };
        assert!(matches!(cfg.check(), Err(CliError::Config(_))));
    }
}
