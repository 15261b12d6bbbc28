//! Retargeting of reconstructed driving scenes to a new camera rig.
//!
//! The crate covers the full data path: rig geometry and pose retargeting,
//! a Gaussian scene with track-driven objects, a tile-based splat renderer
//! with a brute-force reference, vector map labels, Chamfer-distance mAP and
//! a nuScenes-style dataset packager with a validator.
//!
//! Geometry is generic over [`Real`] (`f32`/`f64`); the aliases below fix the
//! scalar to `f64`, which is what file I/O and the CLI use.

pub mod eval;
pub mod geometry;
pub mod map;
pub mod package;
pub mod render;
pub mod scalar;
pub mod scene;
pub mod synth;

pub use scalar::Real;

pub type Pose = geometry::Pose<f64>;
pub type Posef = geometry::Pose<f32>;
pub type CameraIntrinsics = geometry::CameraIntrinsics<f64>;
pub type CameraDef = geometry::CameraDef<f64>;
pub type RigConfig = geometry::RigConfig<f64>;
pub type RigOffset = geometry::RigOffset<f64>;
pub type Gaussian3D = scene::Gaussian3D<f64>;
pub type Track = scene::Track<f64>;
pub type Scene = scene::Scene<f64>;

pub type MapElement = map::MapElement<f64>;
pub type MapLayer = map::MapLayer<f64>;
pub type BevRange = map::BevRange<f64>;
pub type Prediction = eval::Prediction<f64>;
pub type EvalSample = eval::EvalSample<f64>;
