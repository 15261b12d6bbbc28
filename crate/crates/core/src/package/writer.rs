use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::tables::*;
use super::{validate_tables, PackageError, TokenGen};
use crate::geometry::{Pose, RigConfig, RigFile};
use crate::map::{ego_labels, BevRange, MapFile, MapLayer, DEFAULT_NUM_POINTS};
use crate::render::RenderManifest;

/// One keyframe of a scene: target vehicle pose plus one image per camera.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameInput {
    pub t: f64,
    pub ego_pose: Pose<f64>,
    /// Camera name to image file.
    pub images: BTreeMap<String, PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneInput {
    pub name: String,
    pub frames: Vec<FrameInput>,
    /// World-frame labels, re-expressed per sample around the map center.
    pub world_map: Option<MapLayer<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackageOptions {
    /// Dataset name; tables go to `v1.0-<name>/`.
    pub name: String,
    pub seed: u64,
    pub bev_range: BevRange<f64>,
    pub num_points: usize,
    /// Directory with static `<CAMERA>.png` ego masks.
    pub masks_dir: Option<PathBuf>,
    pub vehicle: String,
    pub location: String,
}

impl Default for PackageOptions {
    fn default() -> Self {
        Self {
            name: "crossrig".into(),
            seed: 0,
            bev_range: BevRange::default(),
            num_points: DEFAULT_NUM_POINTS,
            masks_dir: None,
            vehicle: "virtual".into(),
            location: "unknown".into(),
        }
    }
}

impl PackageOptions {
    pub fn version(&self) -> String {
        format!("v1.0-{}", self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SceneSummary {
    pub name: String,
    pub token: String,
    pub nbr_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSummary {
    pub token: String,
    pub scene_token: String,
    pub timestamp: i64,
    pub ego_pose_token: String,
    pub camera_tokens: BTreeMap<String, String>,
    pub lidar_token: String,
}

/// What [`package`] wrote.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetManifest {
    pub version: String,
    pub scenes: Vec<SceneSummary>,
    pub samples: Vec<SampleSummary>,
    pub calibrated_sensors: Vec<CalibratedSensorRecord>,
    pub map_label_files: Vec<String>,
}

/// Groups render manifest rows into frames. Image paths are resolved against
/// `render_dir`; every frame must have an image for every rig camera.
pub fn frames_from_render_manifest(
    manifest: &RenderManifest,
    render_dir: &Path,
    rig: &RigConfig<f64>,
) -> Result<Vec<FrameInput>, PackageError> {
    let mut by_frame: BTreeMap<usize, FrameInput> = BTreeMap::new();
    for row in &manifest.rows {
        let frame = match by_frame.entry(row.frame_index) {
            std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::btree_map::Entry::Vacant(v) => v.insert(FrameInput {
                t: row.t,
                ego_pose: row.vehicle_pose()?,
                images: BTreeMap::new(),
            }),
        };
        frame
            .images
            .insert(row.camera.clone(), render_dir.join(&row.image));
    }
    let frames: Vec<FrameInput> = by_frame.into_values().collect();
    for (i, f) in frames.iter().enumerate() {
        if let Some(cam) = rig.cameras.iter().find(|c| !f.images.contains_key(&c.name)) {
            return Err(PackageError::MissingImage {
                scene: String::new(),
                frame: i,
                camera: cam.name.clone(),
            });
        }
    }
    Ok(frames)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PackageError + '_ {
    move |source| PackageError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), PackageError> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text).map_err(io_err(path))
}

fn timestamp_us(t: f64, t0: f64) -> i64 {
    ((t - t0) * 1e6).round() as i64
}

fn camera_intrinsic(k: &crate::geometry::CameraIntrinsics<f64>) -> Vec<[f64; 3]> {
    k.matrix().to_vec()
}

/// A file copy scheduled while the tables are assembled.
struct Copy {
    from: PathBuf,
    to: PathBuf,
}

/// Writes a nuScenes-style dataset for `scenes` into `out_dir`.
///
/// The dataset is assembled in a sibling temporary directory, checked with
/// the validator, and only then moved into place; an inconsistent result is
/// discarded and reported as [`PackageError::Inconsistent`].
pub fn package(
    scenes: &[SceneInput],
    rig: &RigConfig<f64>,
    options: &PackageOptions,
    out_dir: &Path,
) -> Result<DatasetManifest, PackageError> {
    rig.validate()?;
    for (i, s) in scenes.iter().enumerate() {
        if scenes[..i].iter().any(|p| p.name == s.name) {
            return Err(PackageError::DuplicateScene(s.name.clone()));
        }
        for (frame, f) in s.frames.iter().enumerate() {
            for cam in &rig.cameras {
                match f.images.get(&cam.name) {
                    Some(p) if p.is_file() => {}
                    _ => {
                        return Err(PackageError::MissingImage {
                            scene: s.name.clone(),
                            frame,
                            camera: cam.name.clone(),
                        })
                    }
                }
            }
        }
    }

    let tokens = TokenGen::new(options.seed);
    let version = options.version();
    let mut tables = Tables::default();
    let mut copies: Vec<Copy> = Vec::new();
    let mut placeholders: Vec<PathBuf> = Vec::new();
    let mut labels: Vec<(String, MapFile)> = Vec::new();
    let mut summary = DatasetManifest {
        version: version.clone(),
        scenes: Vec::new(),
        samples: Vec::new(),
        calibrated_sensors: Vec::new(),
        map_label_files: Vec::new(),
    };

    let mut channels: Vec<(&str, &str)> = rig
        .cameras
        .iter()
        .map(|c| (c.name.as_str(), "camera"))
        .collect();
    channels.push((LIDAR_CHANNEL, "lidar"));
    if !scenes.is_empty() {
        for (channel, modality) in &channels {
            tables.sensor.push(SensorRecord {
                token: tokens.token("sensor", &[channel]),
                channel: channel.to_string(),
                modality: modality.to_string(),
            });
        }
    }

    for scene in scenes {
        let name = scene.name.as_str();
        let log_token = tokens.token("log", &[name]);
        tables.log.push(LogRecord {
            token: log_token.clone(),
            logfile: name.to_string(),
            vehicle: options.vehicle.clone(),
            date_captured: String::new(),
            location: options.location.clone(),
        });

        let mut calib_tokens: BTreeMap<&str, String> = BTreeMap::new();
        for cam in &rig.cameras {
            let token = tokens.token("calibrated_sensor", &[name, &cam.name]);
            tables.calibrated_sensor.push(CalibratedSensorRecord {
                token: token.clone(),
                sensor_token: tokens.token("sensor", &[&cam.name]),
                translation: cam.extrinsic.translation_xyz(),
                rotation: cam.extrinsic.rotation_wxyz(),
                camera_intrinsic: camera_intrinsic(&cam.intrinsics),
            });
            calib_tokens.insert(cam.name.as_str(), token);
        }
        let lidar_calib = tokens.token("calibrated_sensor", &[name, LIDAR_CHANNEL]);
        tables.calibrated_sensor.push(CalibratedSensorRecord {
            token: lidar_calib.clone(),
            sensor_token: tokens.token("sensor", &[LIDAR_CHANNEL]),
            translation: rig.lidar_extrinsic.translation_xyz(),
            rotation: rig.lidar_extrinsic.rotation_wxyz(),
            camera_intrinsic: Vec::new(),
        });
        calib_tokens.insert(LIDAR_CHANNEL, lidar_calib);

        let scene_token = tokens.token("scene", &[name]);
        let t0 = scene.frames.first().map_or(0.0, |f| f.t);
        let sample_tokens: Vec<String> = (0..scene.frames.len())
            .map(|i| tokens.token("sample", &[name, &i.to_string()]))
            .collect();
        let sd_token =
            |channel: &str, i: usize| tokens.token("sample_data", &[name, channel, &i.to_string()]);
        let neighbor = |v: &[String], i: usize, d: isize| -> String {
            let j = i as isize + d;
            if j < 0 || j as usize >= v.len() {
                String::new()
            } else {
                v[j as usize].clone()
            }
        };

        for (i, frame) in scene.frames.iter().enumerate() {
            let ts = timestamp_us(frame.t, t0);
            let sample_token = sample_tokens[i].clone();
            let ego_token = tokens.token("ego_pose", &[name, &i.to_string()]);
            tables.sample.push(SampleRecord {
                token: sample_token.clone(),
                timestamp: ts,
                prev: neighbor(&sample_tokens, i, -1),
                next: neighbor(&sample_tokens, i, 1),
                scene_token: scene_token.clone(),
            });
            tables.ego_pose.push(EgoPoseRecord {
                token: ego_token.clone(),
                timestamp: ts,
                rotation: frame.ego_pose.rotation_wxyz(),
                translation: frame.ego_pose.translation_xyz(),
            });
            let mut camera_tokens = BTreeMap::new();
            for (channel, _) in &channels {
                let is_lidar = *channel == LIDAR_CHANNEL;
                let ext = if is_lidar { "pcd.bin" } else { "png" };
                let filename = format!("samples/{channel}/{name}__{channel}__{ts}.{ext}");
                let (width, height) = match rig.camera(channel) {
                    Some(c) => (c.intrinsics.width, c.intrinsics.height),
                    None => (0, 0),
                };
                let token = sd_token(channel, i);
                let chain: Vec<String> = (0..scene.frames.len())
                    .map(|k| sd_token(channel, k))
                    .collect();
                tables.sample_data.push(SampleDataRecord {
                    token: token.clone(),
                    sample_token: sample_token.clone(),
                    ego_pose_token: ego_token.clone(),
                    calibrated_sensor_token: calib_tokens[channel].clone(),
                    timestamp: ts,
                    fileformat: if is_lidar { "pcd" } else { "png" }.to_string(),
                    is_key_frame: true,
                    height,
                    width,
                    filename: filename.clone(),
                    prev: neighbor(&chain, i, -1),
                    next: neighbor(&chain, i, 1),
                });
                if is_lidar {
                    placeholders.push(PathBuf::from(&filename));
                } else {
                    camera_tokens.insert(channel.to_string(), token.clone());
                    copies.push(Copy {
                        from: frame.images[*channel].clone(),
                        to: PathBuf::from(&filename),
                    });
                }
            }
            if let Some(world) = &scene.world_map {
                let center = frame.ego_pose.compose(&rig.lidar_extrinsic);
                let layer = ego_labels(world, &center, &options.bev_range, options.num_points)?;
                let rel = format!("maps/labels/{sample_token}.json");
                labels.push((
                    rel.clone(),
                    MapFile::from_layer(&layer, Some(options.bev_range)),
                ));
                summary.map_label_files.push(rel);
            }
            summary.samples.push(SampleSummary {
                token: sample_token.clone(),
                scene_token: scene_token.clone(),
                timestamp: ts,
                ego_pose_token: ego_token,
                lidar_token: sd_token(LIDAR_CHANNEL, i),
                camera_tokens,
            });
        }

        tables.scene.push(SceneRecord {
            token: scene_token.clone(),
            log_token,
            nbr_samples: scene.frames.len(),
            first_sample_token: sample_tokens.first().cloned().unwrap_or_default(),
            last_sample_token: sample_tokens.last().cloned().unwrap_or_default(),
            name: name.to_string(),
            description: format!("retargeted to rig {}", rig.rig_name),
        });
        summary.scenes.push(SceneSummary {
            name: name.to_string(),
            token: scene_token,
            nbr_samples: scene.frames.len(),
        });
    }
    summary.calibrated_sensors = tables.calibrated_sensor.clone();

    let internal = validate_tables(&tables, Some(rig));
    if !internal.is_empty() {
        return Err(PackageError::Inconsistent(internal));
    }

    // Assemble in a temporary sibling directory, then move into place.
    let parent = out_dir
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    let dir_name = out_dir
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    let tmp = parent.join(format!(".{dir_name}.tmp-{}", std::process::id()));
    if tmp.exists() {
        std::fs::remove_dir_all(&tmp).map_err(io_err(&tmp))?;
    }
    let result = write_tree(
        &tmp,
        &tables,
        &copies,
        &placeholders,
        &labels,
        rig,
        options,
        &version,
    )
    .and_then(|()| {
        let report = super::validate(&tmp)?;
        if report.is_ok() {
            Ok(())
        } else {
            Err(PackageError::Inconsistent(report.violations))
        }
    });
    if let Err(e) = result {
        let _ = std::fs::remove_dir_all(&tmp);
        return Err(e);
    }
    if out_dir.exists() {
        std::fs::remove_dir_all(out_dir).map_err(io_err(out_dir))?;
    }
    std::fs::rename(&tmp, out_dir).map_err(io_err(out_dir))?;
    Ok(summary)
}

#[allow(clippy::too_many_arguments)]
fn write_tree(
    root: &Path,
    tables: &Tables,
    copies: &[Copy],
    placeholders: &[PathBuf],
    labels: &[(String, MapFile)],
    rig: &RigConfig<f64>,
    options: &PackageOptions,
    version: &str,
) -> Result<(), PackageError> {
    let table_dir = root.join(version);
    std::fs::create_dir_all(&table_dir).map_err(io_err(&table_dir))?;
    for sub in ["samples", "maps/labels"] {
        let d = root.join(sub);
        std::fs::create_dir_all(&d).map_err(io_err(&d))?;
    }
    for cam in &rig.cameras {
        let d = root.join("samples").join(&cam.name);
        std::fs::create_dir_all(&d).map_err(io_err(&d))?;
    }
    let d = root.join("samples").join(LIDAR_CHANNEL);
    std::fs::create_dir_all(&d).map_err(io_err(&d))?;

    write_json(&table_dir.join("log.json"), &tables.log)?;
    write_json(&table_dir.join("scene.json"), &tables.scene)?;
    write_json(&table_dir.join("sample.json"), &tables.sample)?;
    write_json(&table_dir.join("sample_data.json"), &tables.sample_data)?;
    write_json(&table_dir.join("ego_pose.json"), &tables.ego_pose)?;
    write_json(
        &table_dir.join("calibrated_sensor.json"),
        &tables.calibrated_sensor,
    )?;
    write_json(&table_dir.join("sensor.json"), &tables.sensor)?;
    for name in OPTIONAL_TABLES {
        write_json(
            &table_dir.join(format!("{name}.json")),
            &[] as &[serde_json::Value],
        )?;
    }
    let meta = DatasetMeta {
        version: version.to_string(),
        seed: options.seed,
        rig: RigFile::from_rig(rig),
        bev_range: options.bev_range,
        num_points: options.num_points,
        ego_axes: "x forward, y left, z up (right-handed)".into(),
        map_center: MapCenter {
            channel: LIDAR_CHANNEL.into(),
            rotation: rig.lidar_extrinsic.rotation_wxyz(),
            translation: rig.lidar_extrinsic.translation_xyz(),
        },
        timestamp_unit: "microseconds since scene start".into(),
    };
    write_json(&table_dir.join(META_FILE), &meta)?;

    copies.par_iter().try_for_each(|c| {
        let to = root.join(&c.to);
        std::fs::copy(&c.from, &to)
            .map(|_| ())
            .map_err(io_err(&c.from))
    })?;
    for p in placeholders {
        let to = root.join(p);
        std::fs::write(&to, []).map_err(io_err(&to))?;
    }
    for (rel, file) in labels {
        let to = root.join(rel);
        std::fs::write(&to, serde_json::to_string(file)?).map_err(io_err(&to))?;
    }
    if let Some(masks) = &options.masks_dir {
        let out = root.join("masks");
        std::fs::create_dir_all(&out).map_err(io_err(&out))?;
        for cam in &rig.cameras {
            let src = masks.join(format!("{}.png", cam.name));
            if src.is_file() {
                let to = out.join(format!("{}.png", cam.name));
                std::fs::copy(&src, &to).map_err(io_err(&src))?;
            } else {
                log::warn!("no ego mask for {} in {}", cam.name, masks.display());
            }
        }
    }
    Ok(())
}
