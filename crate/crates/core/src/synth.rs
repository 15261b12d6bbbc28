//! A small procedural driving scene: a textured two-lane road, two cars on
//! straight tracks, the matching vector map, a 7-camera ring rig and a
//! 6-camera surround rig. Used by the demo command and the end-to-end tests.

use std::path::{Path, PathBuf};

use nalgebra::{UnitQuaternion, Vector2, Vector3};

use crate::geometry::{
    save_rig, save_trajectory, AxisConvention, CameraDef, CameraIntrinsics, GeometryError, Pose,
    RigConfig, RigOffset, Trajectory,
};
use crate::map::{save_map, Frame, MapClass, MapElement, MapFile, MapLayer};
use crate::scene::{
    tracks_to_file, write_gaussian_ply, DynamicObject, Gaussian3D, Keyframe, Scene, SceneError,
    SceneMeta, SkyModel, Track,
};

pub const LANE_WIDTH: f64 = 3.5;
/// Height of the ring rig's vehicle origin (rear axle) above the ground.
pub const SOURCE_ORIGIN_HEIGHT: f64 = 0.33;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOptions {
    /// Ground grid cells along the road and across it.
    pub ground_nx: usize,
    pub ground_ny: usize,
    pub frames: usize,
    pub keyframe_hz: f64,
    pub ego_speed: f64,
    /// Target image size; the source rig uses the same aspect.
    pub width: u32,
    pub height: u32,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            ground_nx: 100,
            ground_ny: 50,
            frames: 10,
            keyframe_hz: 2.0,
            ego_speed: 5.0,
            width: 160,
            height: 90,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticWorld {
    pub scene: Scene<f64>,
    pub source_rig: RigConfig<f64>,
    pub target_rig: RigConfig<f64>,
    pub offset: RigOffset<f64>,
    /// Source vehicle poses.
    pub trajectory: Trajectory,
    pub world_map: MapLayer<f64>,
}

/// Files written by [`SyntheticWorld::write_inputs`].
#[derive(Debug, Clone, PartialEq)]
pub struct SynthPaths {
    pub background: PathBuf,
    pub tracks: PathBuf,
    pub objects_dir: PathBuf,
    pub source_rig: PathBuf,
    pub target_rig: PathBuf,
    pub trajectory: PathBuf,
    pub map: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Map(#[from] crate::map::MapError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Integer hash in [0, 1), for texture noise without an RNG.
fn hash01(i: i64, j: i64) -> f64 {
    let mut h = (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (j as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    h ^= h >> 31;
    h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    h ^= h >> 29;
    (h >> 11) as f64 / (1u64 << 53) as f64
}

fn ground_color(x: f64, y: f64, i: i64, j: i64) -> [f64; 3] {
    let n = 0.06 * (hash01(i, j) - 0.5);
    let edge = LANE_WIDTH;
    if y.abs() > edge + 0.5 {
        return [0.25 + n, 0.45 + n, 0.2 + n];
    }
    let paint_solid = (y.abs() - edge).abs() < 0.3;
    let paint_dashed = y.abs() < 0.3 && x.rem_euclid(6.0) < 3.0;
    if paint_solid || paint_dashed {
        return [0.92, 0.92, 0.9];
    }
    let checker = if (i + j).rem_euclid(2) == 0 {
        0.03
    } else {
        -0.03
    };
    let g = 0.33 + checker + n;
    [g, g, g + 0.01]
}

fn ground(options: &SynthOptions) -> Result<Vec<Gaussian3D<f64>>, SceneError> {
    let (x0, x1) = (-20.0, 80.0);
    let (y0, y1) = (-12.5, 12.5);
    let dx = (x1 - x0) / options.ground_nx as f64;
    let dy = (y1 - y0) / options.ground_ny as f64;
    let mut out = Vec::with_capacity(options.ground_nx * options.ground_ny);
    for i in 0..options.ground_nx {
        for j in 0..options.ground_ny {
            let x = x0 + (i as f64 + 0.5) * dx;
            let y = y0 + (j as f64 + 0.5) * dy;
            out.push(Gaussian3D::with_rgb(
                Vector3::new(x, y, 0.0),
                Vector3::new(0.4 * dx, 0.4 * dy, 0.02),
                UnitQuaternion::identity(),
                0.95,
                ground_color(x, y, i as i64, j as i64),
            )?);
        }
    }
    Ok(out)
}

const CAR_SIZE: [f64; 3] = [4.4, 1.8, 1.5];

fn car(
    id: &str,
    rgb: [f64; 3],
    keys: &[(f64, f64, f64, f64)],
) -> Result<DynamicObject<f64>, SceneError> {
    let size = Vector3::from(CAR_SIZE);
    let keyframes = keys
        .iter()
        .map(|&(t, x, y, yaw)| Keyframe {
            t,
            pose: Pose::from_yaw(yaw, Vector3::new(x, y, 0.5 * CAR_SIZE[2])),
            size,
        })
        .collect();
    let track = Track::new(id, keyframes)?;
    let mut gaussians = Vec::new();
    for a in 0..5 {
        for b in 0..3 {
            for c in 0..3 {
                let f = Vector3::new(
                    a as f64 / 4.0 - 0.5,
                    b as f64 / 2.0 - 0.5,
                    c as f64 / 2.0 - 0.5,
                );
                let mean = f.component_mul(&size) * 0.8;
                let shade = 0.75 + 0.25 * (c as f64 / 2.0);
                gaussians.push(Gaussian3D::with_rgb(
                    mean,
                    Vector3::new(0.5, 0.35, 0.3),
                    UnitQuaternion::identity(),
                    0.9,
                    rgb.map(|v| v * shade),
                )?);
            }
        }
    }
    DynamicObject::new(track, gaussians)
}

fn pinhole(
    name: &str,
    fov_deg: f64,
    width: u32,
    height: u32,
    yaw_deg: f64,
    pos: [f64; 3],
) -> CameraDef<f64> {
    let fx = 0.5 * width as f64 / (0.5 * fov_deg.to_radians()).tan();
    let intrinsics = CameraIntrinsics::new(
        fx,
        fx,
        0.5 * width as f64 - 0.5,
        0.5 * height as f64 - 0.5,
        width,
        height,
    )
    .expect("positive focal length");
    let declared = Pose::from_yaw(yaw_deg.to_radians(), Vector3::from(pos));
    CameraDef {
        name: name.into(),
        intrinsics,
        extrinsic: AxisConvention::Flu.to_rdf_extrinsic(&declared),
    }
}

/// Seven ring cameras, origin at the rear axle.
pub fn ring_rig(width: u32, height: u32) -> RigConfig<f64> {
    let h = 1.4;
    let cams = [
        ("ring_front_center", 0.0, [1.6, 0.0, h], 60.0),
        ("ring_front_left", 45.0, [1.5, 0.5, h], 70.0),
        ("ring_front_right", -45.0, [1.5, -0.5, h], 70.0),
        ("ring_side_left", 90.0, [1.0, 0.9, h], 70.0),
        ("ring_side_right", -90.0, [1.0, -0.9, h], 70.0),
        ("ring_rear_left", 135.0, [0.0, 0.7, h], 70.0),
        ("ring_rear_right", -135.0, [0.0, -0.7, h], 70.0),
    ];
    let cameras = cams
        .iter()
        .map(|&(n, yaw, pos, fov)| pinhole(n, fov, width, height, yaw, pos))
        .collect();
    RigConfig::new(
        "ring7",
        cameras,
        "x forward, y left, z up; origin at rear axle center",
    )
    .expect("valid rig")
}

/// Six surround cameras, origin on the ground below the rear axle.
pub fn surround_rig(width: u32, height: u32) -> RigConfig<f64> {
    let h = 1.5;
    let cams = [
        ("CAM_FRONT", 0.0, [1.7, 0.0, h], 70.0),
        ("CAM_FRONT_RIGHT", -55.0, [1.5, -0.5, h], 70.0),
        ("CAM_BACK_RIGHT", -110.0, [1.0, -0.5, h], 70.0),
        ("CAM_BACK", 180.0, [0.0, 0.0, h], 110.0),
        ("CAM_BACK_LEFT", 110.0, [1.0, 0.5, h], 70.0),
        ("CAM_FRONT_LEFT", 55.0, [1.5, 0.5, h], 70.0),
    ];
    let cameras = cams
        .iter()
        .map(|&(n, yaw, pos, fov)| pinhole(n, fov, width, height, yaw, pos))
        .collect();
    RigConfig::new(
        "surround6",
        cameras,
        "x forward, y left, z up; origin on the ground",
    )
    .expect("valid rig")
    .with_lidar_extrinsic(Pose::from_translation(0.94, 0.0, 1.84))
}

fn polyline(
    xs: (f64, f64),
    y: f64,
    class: MapClass,
) -> Result<MapElement<f64>, crate::map::MapError> {
    MapElement::open(
        vec![Vector2::new(xs.0, y), Vector2::new(xs.1, y)],
        Frame::World,
        class,
    )
}

/// Road map in world coordinates, all four classes present.
pub fn road_map() -> Result<MapLayer<f64>, crate::map::MapError> {
    let span = (-40.0, 120.0);
    let mut elements = vec![
        polyline(span, LANE_WIDTH, MapClass::Boundary)?,
        polyline(span, -LANE_WIDTH, MapClass::Boundary)?,
        polyline(span, 0.0, MapClass::Divider)?,
        polyline(span, 0.5 * LANE_WIDTH, MapClass::Centerline)?,
        polyline((span.1, span.0), -0.5 * LANE_WIDTH, MapClass::Centerline)?,
    ];
    for x in [30.0, 70.0] {
        let w = LANE_WIDTH;
        elements.push(MapElement::new(
            vec![
                Vector2::new(x, -w),
                Vector2::new(x + 4.0, -w),
                Vector2::new(x + 4.0, w),
                Vector2::new(x, w),
            ],
            Frame::World,
            MapClass::Crossing,
            true,
        )?);
    }
    MapLayer::new(Frame::World, elements)
}

impl SyntheticWorld {
    pub fn generate(options: &SynthOptions) -> Result<Self, SynthError> {
        let background = ground(options)?;
        let objects = vec![
            car(
                "car_lead",
                [0.8, 0.1, 0.1],
                &[
                    (0.0, 12.0, -0.5 * LANE_WIDTH, 0.0),
                    (10.0, 82.0, -0.5 * LANE_WIDTH, 0.0),
                ],
            )?,
            car(
                "car_oncoming",
                [0.1, 0.2, 0.8],
                &[
                    (0.0, 45.0, 0.5 * LANE_WIDTH, std::f64::consts::PI),
                    (10.0, -5.0, 0.5 * LANE_WIDTH, std::f64::consts::PI),
                ],
            )?,
        ];
        let meta = SceneMeta {
            scene_id: "synthetic-road".into(),
            source_rig: "ring7".into(),
            frame_count: options.frames,
        };
        let scene = Scene::new(background, objects, SkyModel::default(), meta)?;
        let trajectory = (0..options.frames)
            .map(|k| {
                let t = k as f64 / options.keyframe_hz;
                let pose = Pose::from_translation(
                    options.ego_speed * t,
                    -0.5 * LANE_WIDTH,
                    SOURCE_ORIGIN_HEIGHT,
                );
                (t, pose)
            })
            .collect();
        Ok(Self {
            scene,
            source_rig: ring_rig(options.width, options.height),
            target_rig: surround_rig(options.width, options.height),
            offset: RigOffset::vertical(SOURCE_ORIGIN_HEIGHT),
            trajectory,
            world_map: road_map()?,
        })
    }

    /// Writes the world as toolkit input files under `dir`.
    pub fn write_inputs(&self, dir: &Path) -> Result<SynthPaths, SynthError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| SynthError::Io { path, source }
        };
        let paths = SynthPaths {
            background: dir.join("background.ply"),
            tracks: dir.join("tracks.json"),
            objects_dir: dir.join("objects"),
            source_rig: dir.join("source_rig.json"),
            target_rig: dir.join("target_rig.json"),
            trajectory: dir.join("trajectory.jsonl"),
            map: dir.join("map.json"),
        };
        std::fs::create_dir_all(&paths.objects_dir).map_err(io(&paths.objects_dir))?;
        write_gaussian_ply(&paths.background, &self.scene.background, false)?;
        let tracks: Vec<Track<f64>> = self.scene.objects.iter().map(|o| o.track.clone()).collect();
        let text = serde_json::to_string_pretty(&tracks_to_file(&tracks)).expect("plain records");
        std::fs::write(&paths.tracks, text).map_err(io(&paths.tracks))?;
        for o in &self.scene.objects {
            write_gaussian_ply(
                paths.objects_dir.join(format!("{}.ply", o.track.track_id)),
                &o.gaussians,
                false,
            )?;
        }
        save_rig(&self.source_rig, &paths.source_rig)?;
        save_rig(&self.target_rig, &paths.target_rig)?;
        save_trajectory(&self.trajectory, &paths.trajectory)?;
        save_map(&MapFile::from_layer(&self.world_map, None), &paths.map)?;
        Ok(paths)
    }
}
