use nalgebra::{Vector2, Vector3};

use super::{GeometryError, Pose};
use crate::scalar::{cast, Real};

/// Smallest camera-space depth accepted by [`project_point`].
pub const MIN_PROJECTION_DEPTH: f64 = 1e-6;

/// Ideal pinhole intrinsics. Pixel `(i, j)` is centered at coordinate `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics<T: Real> {
    pub fx: T,
    pub fy: T,
    pub cx: T,
    pub cy: T,
    pub width: u32,
    pub height: u32,
}

impl<T: Real> CameraIntrinsics<T> {
    pub fn new(fx: T, fy: T, cx: T, cy: T, width: u32, height: u32) -> Result<Self, GeometryError> {
        let k = Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let bad = |why: &str| Err(GeometryError::InvalidIntrinsics(why.to_string()));
        if self.width == 0 || self.height == 0 {
            return bad("width and height must be positive");
        }
        if !(self.fx > T::zero() && self.fy > T::zero()) {
            return bad("focal lengths must be positive");
        }
        let (w, h) = (T::lit(self.width as f64), T::lit(self.height as f64));
        if !(self.cx >= T::zero() && self.cx < w) {
            return bad("cx must lie in [0, width)");
        }
        if !(self.cy >= T::zero() && self.cy < h) {
            return bad("cy must lie in [0, height)");
        }
        Ok(())
    }

    /// Row-major 3x3 calibration matrix.
    pub fn matrix(&self) -> [[T; 3]; 3] {
        let (z, o) = (T::zero(), T::one());
        [[self.fx, z, self.cx], [z, self.fy, self.cy], [z, z, o]]
    }

    /// Intrinsics for the same camera at a different output resolution.
    pub fn resized(&self, width: u32, height: u32) -> Result<Self, GeometryError> {
        let sx = T::lit(width as f64 / self.width as f64);
        let sy = T::lit(height as f64 / self.height as f64);
        Self::new(
            self.fx * sx,
            self.fy * sy,
            self.cx * sx,
            self.cy * sy,
            width,
            height,
        )
    }

    pub fn cast<U: Real>(&self) -> CameraIntrinsics<U> {
        CameraIntrinsics {
            fx: cast(self.fx),
            fy: cast(self.fy),
            cx: cast(self.cx),
            cy: cast(self.cy),
            width: self.width,
            height: self.height,
        }
    }
}

/// Pinhole projection of a camera-frame point (+z forward, +x right, +y down).
pub fn project_point<T: Real>(
    p_cam: &Vector3<T>,
    k: &CameraIntrinsics<T>,
) -> Result<Vector2<T>, GeometryError> {
    if p_cam.z <= T::lit(MIN_PROJECTION_DEPTH) {
        return Err(GeometryError::BehindCamera {
            z: p_cam.z.as_f64(),
        });
    }
    Ok(Vector2::new(
        k.fx * p_cam.x / p_cam.z + k.cx,
        k.fy * p_cam.y / p_cam.z + k.cy,
    ))
}

/// One camera of a rig. `extrinsic` is camera-to-vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraDef<T: Real> {
    pub name: String,
    pub intrinsics: CameraIntrinsics<T>,
    pub extrinsic: Pose<T>,
}

/// Camera axis conventions accepted in rig files.
///
/// Each variant names the axes of the declared camera frame. Extrinsics are
/// converted to the internal right/down/forward frame at load time:
///
/// | convention | x       | y     | z        |
/// |------------|---------|-------|----------|
/// | `rdf`      | right   | down  | forward  |
/// | `opengl`   | right   | up    | backward |
/// | `flu`      | forward | left  | up       |
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum AxisConvention {
    #[default]
    Rdf,
    Opengl,
    Flu,
}

impl AxisConvention {
    /// Rotation taking internal camera coordinates into the declared ones
    /// (`p_declared = R * p_rdf`), as `(w, x, y, z)`.
    pub fn from_rdf_wxyz(self) -> [f64; 4] {
        match self {
            AxisConvention::Rdf => [1.0, 0.0, 0.0, 0.0],
            // diag(1, -1, -1): half turn about x
            AxisConvention::Opengl => [0.0, 1.0, 0.0, 0.0],
            // columns: rdf x -> -y, rdf y -> -z, rdf z -> +x
            AxisConvention::Flu => [0.5, -0.5, 0.5, -0.5],
        }
    }

    /// Converts a declared-frame camera-to-vehicle extrinsic into the internal frame.
    pub fn to_rdf_extrinsic<T: Real>(self, declared: &Pose<T>) -> Pose<T> {
        let [w, x, y, z] = self.from_rdf_wxyz().map(T::lit);
        let fix = Pose::from_wxyz([w, x, y, z], [T::zero(); 3]).expect("constant rotation");
        declared.compose(&fix)
    }
}

/// A vehicle's camera set.
#[derive(Debug, Clone, PartialEq)]
pub struct RigConfig<T: Real> {
    pub rig_name: String,
    pub cameras: Vec<CameraDef<T>>,
    pub frame_note: String,
    /// Virtual LiDAR extrinsic (sensor-to-vehicle); anchors the map center.
    pub lidar_extrinsic: Pose<T>,
}

impl<T: Real> RigConfig<T> {
    pub fn new(
        rig_name: impl Into<String>,
        cameras: Vec<CameraDef<T>>,
        frame_note: impl Into<String>,
    ) -> Result<Self, GeometryError> {
        let rig = Self {
            rig_name: rig_name.into(),
            cameras,
            frame_note: frame_note.into(),
            lidar_extrinsic: Pose::identity(),
        };
        rig.validate()?;
        Ok(rig)
    }

    pub fn with_lidar_extrinsic(mut self, extrinsic: Pose<T>) -> Self {
        self.lidar_extrinsic = extrinsic;
        self
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.cameras.is_empty() {
            return Err(GeometryError::EmptyRig(self.rig_name.clone()));
        }
        for (i, cam) in self.cameras.iter().enumerate() {
            cam.intrinsics.validate()?;
            if self.cameras[..i].iter().any(|c| c.name == cam.name) {
                return Err(GeometryError::DuplicateCamera(cam.name.clone()));
            }
        }
        Ok(())
    }

    pub fn camera(&self, name: &str) -> Option<&CameraDef<T>> {
        self.cameras.iter().find(|c| c.name == name)
    }

    pub fn len(&self) -> usize {
        self.cameras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cameras.is_empty()
    }
}

/// `V_S <- V_T`: maps target-vehicle coordinates into source-vehicle coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RigOffset<T: Real> {
    pub transform: Pose<T>,
}

impl<T: Real> RigOffset<T> {
    pub fn new(transform: Pose<T>) -> Self {
        Self { transform }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    /// Pure vertical offset between vehicle origins: a source frame that sits
    /// `height` meters above the target frame gives `z = -height`.
    pub fn vertical(height_of_source_above_target: T) -> Self {
        Self::new(Pose::from_translation(
            T::zero(),
            T::zero(),
            -height_of_source_above_target,
        ))
    }
}

/// World pose of the target vehicle: `G_T_VS * VS_T_VT`.
pub fn target_vehicle_pose<T: Real>(source_vehicle: &Pose<T>, offset: &RigOffset<T>) -> Pose<T> {
    source_vehicle.compose(&offset.transform)
}

/// World pose of a target camera: `G_T_VT * VT_T_CT`.
pub fn target_camera_pose<T: Real>(target_vehicle: &Pose<T>, camera: &CameraDef<T>) -> Pose<T> {
    target_vehicle.compose(&camera.extrinsic)
}
