//! Reconstructed scene model: static background Gaussians, rigid dynamic
//! objects that follow box tracks, and a constant sky color.

mod gaussian;
pub mod ply;
mod track;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use gaussian::{eval_sh, rgb_to_sh_dc, Gaussian3D, SH_COUNTS};
pub use ply::{read_gaussian_ply, write_gaussian_ply};
pub use track::{object_pose_at, Keyframe, Track, TRACK_TIME_TOLERANCE_S};

use crate::geometry::Pose;
use crate::scalar::Real;

/// Object Gaussians must lie within the box half-extent times this factor.
pub const BOX_DILATION: f64 = 1.5;

pub const DEFAULT_SKY: [f64; 3] = [0.53, 0.81, 0.92];

#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing {source_name}: {message}")]
    Parse {
        source_name: String,
        message: String,
    },
    #[error("track {track_id:?} has no object file at {path}")]
    MissingObject { track_id: String, path: PathBuf },
    #[error("invariant violated at record {index}: {what}")]
    Invariant { what: String, index: usize },
    #[error("t = {t} outside track {track_id:?} range [{first}, {last}]")]
    OutOfTrackRange {
        track_id: String,
        t: f64,
        first: f64,
        last: f64,
    },
}

/// Constant sky color composited behind residual transmittance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkyModel {
    pub color: [f64; 3],
}

impl Default for SkyModel {
    fn default() -> Self {
        Self { color: DEFAULT_SKY }
    }
}

impl SkyModel {
    pub fn constant(color: [f64; 3]) -> Result<Self, SceneError> {
        if color.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(SceneError::Invariant {
                what: format!("sky color {color:?} outside [0, 1]"),
                index: 0,
            });
        }
        Ok(Self { color })
    }
}

/// A rigid object: Gaussians in the box frame plus the box track.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicObject<T: Real> {
    pub track: Track<T>,
    pub gaussians: Vec<Gaussian3D<T>>,
}

impl<T: Real> DynamicObject<T> {
    pub fn new(track: Track<T>, gaussians: Vec<Gaussian3D<T>>) -> Result<Self, SceneError> {
        let half = track.max_size() * T::lit(0.5 * BOX_DILATION);
        for (index, g) in gaussians.iter().enumerate() {
            if (0..3).any(|i| g.mean[i].abs() > half[i]) {
                return Err(SceneError::Invariant {
                    what: format!(
                        "object {:?} gaussian mean outside its dilated box",
                        track.track_id
                    ),
                    index,
                });
            }
        }
        Ok(Self { track, gaussians })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SceneMeta {
    pub scene_id: String,
    pub source_rig: String,
    pub frame_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene<T: Real> {
    pub background: Vec<Gaussian3D<T>>,
    pub objects: Vec<DynamicObject<T>>,
    pub sky: SkyModel,
    pub meta: SceneMeta,
}

impl<T: Real> Scene<T> {
    pub fn new(
        background: Vec<Gaussian3D<T>>,
        objects: Vec<DynamicObject<T>>,
        sky: SkyModel,
        meta: SceneMeta,
    ) -> Result<Self, SceneError> {
        for (i, o) in objects.iter().enumerate() {
            if objects[..i]
                .iter()
                .any(|p| p.track.track_id == o.track.track_id)
            {
                return Err(SceneError::Invariant {
                    what: format!("duplicate track id {:?}", o.track.track_id),
                    index: i,
                });
            }
        }
        Ok(Self {
            background,
            objects,
            sky,
            meta,
        })
    }

    /// World-frame Gaussians at time `t`. See [`flatten_at`].
    pub fn flatten_at(&self, t: T) -> Vec<Gaussian3D<T>> {
        flatten_at(self, t)
    }
}

/// Background Gaussians followed by every object whose track covers `t`,
/// moved to its box pose. Objects outside their track range are left out.
pub fn flatten_at<T: Real>(scene: &Scene<T>, t: T) -> Vec<Gaussian3D<T>> {
    let mut out = scene.background.clone();
    for obj in &scene.objects {
        let Ok(pose) = object_pose_at(&obj.track, t) else {
            continue;
        };
        out.extend(obj.gaussians.iter().map(|g| g.transformed(&pose)));
    }
    out
}

/// One entry of the tracks file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KeyframeRecord {
    pub t: f64,
    pub rotation_wxyz: [f64; 4],
    pub translation_xyz_m: [f64; 3],
    pub size_lwh_m: [f64; 3],
}

/// `track_id -> keyframes`.
pub type TracksFile = BTreeMap<String, Vec<KeyframeRecord>>;

pub fn parse_tracks(text: &str) -> Result<Vec<Track<f64>>, SceneError> {
    let file: TracksFile = serde_json::from_str(text).map_err(|e| SceneError::Parse {
        source_name: "tracks".into(),
        message: e.to_string(),
    })?;
    file.into_iter()
        .map(|(id, records)| {
            let keyframes = records
                .iter()
                .enumerate()
                .map(|(index, r)| {
                    let pose =
                        Pose::from_wxyz(r.rotation_wxyz, r.translation_xyz_m).map_err(|e| {
                            SceneError::Invariant {
                                what: format!("track {id:?}: {e}"),
                                index,
                            }
                        })?;
                    if r.size_lwh_m.iter().any(|s| !(*s > 0.0)) {
                        return Err(SceneError::Invariant {
                            what: format!("track {id:?}: box size must be positive"),
                            index,
                        });
                    }
                    Ok(Keyframe {
                        t: r.t,
                        pose,
                        size: r.size_lwh_m.into(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Track::new(id, keyframes)
        })
        .collect()
}

pub fn tracks_to_file(tracks: &[Track<f64>]) -> TracksFile {
    tracks
        .iter()
        .map(|t| {
            let records = t
                .keyframes()
                .iter()
                .map(|k| KeyframeRecord {
                    t: k.t,
                    rotation_wxyz: k.pose.rotation_wxyz(),
                    translation_xyz_m: k.pose.translation_xyz(),
                    size_lwh_m: k.size.into(),
                })
                .collect();
            (t.track_id.clone(), records)
        })
        .collect()
}

fn read_text(path: &Path) -> Result<String, SceneError> {
    std::fs::read_to_string(path).map_err(|source| SceneError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a scene from a background PLY, a tracks JSON file and a directory
/// holding one `<track_id>.ply` per track.
pub fn load_scene(
    background_path: impl AsRef<Path>,
    tracks_path: Option<&Path>,
    objects_dir: Option<&Path>,
    sky_color: [f64; 3],
) -> Result<Scene<f64>, SceneError> {
    let background_path = background_path.as_ref();
    let background = read_gaussian_ply(background_path)?;
    let tracks = match tracks_path {
        Some(p) => parse_tracks(&read_text(p)?).map_err(|e| match e {
            SceneError::Parse { message, .. } => SceneError::Parse {
                source_name: p.display().to_string(),
                message,
            },
            other => other,
        })?,
        None => Vec::new(),
    };
    let mut objects = Vec::with_capacity(tracks.len());
    for track in tracks {
        let path = objects_dir
            .map(|d| d.join(format!("{}.ply", track.track_id)))
            .unwrap_or_else(|| PathBuf::from(format!("{}.ply", track.track_id)));
        if !path.is_file() {
            return Err(SceneError::MissingObject {
                track_id: track.track_id.clone(),
                path,
            });
        }
        let gaussians = read_gaussian_ply(&path)?;
        objects.push(DynamicObject::new(track, gaussians)?);
    }
    let meta = SceneMeta {
        scene_id: background_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        ..SceneMeta::default()
    };
    Scene::new(background, objects, SkyModel::constant(sky_color)?, meta)
}
