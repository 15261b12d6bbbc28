use nalgebra::{Matrix2, Matrix2x3, Vector2};

use super::RenderError;
use crate::geometry::{CameraIntrinsics, Pose};
use crate::scalar::{cast, Real};
use crate::scene::Gaussian3D;

/// Added to the projected covariance diagonal (pixels^2).
pub const LOW_PASS: f64 = 0.3;
/// Splat support radius in standard deviations.
pub const SIGMA_CUTOFF: f64 = 3.0;
/// The Jacobian is evaluated with the view ray clamped to this multiple of
/// the half field of view, so splats just outside the frustum stay bounded.
pub const FRUSTUM_GUARD: f64 = 1.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderCamera<T: Real> {
    /// Camera-to-world.
    pub pose: Pose<T>,
    pub intrinsics: CameraIntrinsics<T>,
    pub near: T,
    pub far: T,
}

impl<T: Real> RenderCamera<T> {
    pub const DEFAULT_NEAR: f64 = 0.2;
    pub const DEFAULT_FAR: f64 = 1000.0;

    pub fn new(pose: Pose<T>, intrinsics: CameraIntrinsics<T>) -> Self {
        Self {
            pose,
            intrinsics,
            near: T::lit(Self::DEFAULT_NEAR),
            far: T::lit(Self::DEFAULT_FAR),
        }
    }

    pub fn with_clip(mut self, near: T, far: T) -> Result<Self, RenderError> {
        if !(near > T::zero() && near < far) {
            return Err(RenderError::InvalidCamera(format!(
                "need 0 < near < far, got near={} far={}",
                near.as_f64(),
                far.as_f64()
            )));
        }
        self.near = near;
        self.far = far;
        Ok(self)
    }

    pub fn cast<U: Real>(&self) -> RenderCamera<U> {
        RenderCamera {
            pose: self.pose.cast(),
            intrinsics: self.intrinsics.cast(),
            near: cast(self.near),
            far: cast(self.far),
        }
    }
}

/// A Gaussian projected to the image plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Splat2D<T: Real> {
    pub mean2d: Vector2<T>,
    pub cov2d: Matrix2<T>,
    /// Inverse of `cov2d`.
    pub conic: Matrix2<T>,
    pub depth: T,
    pub opacity: T,
    pub rgb: [T; 3],
}

impl<T: Real> Splat2D<T> {
    /// Half widths of the axis-aligned box around the support ellipse.
    pub fn extent(&self) -> Vector2<T> {
        let k = T::lit(SIGMA_CUTOFF);
        Vector2::new(k * self.cov2d[(0, 0)].sqrt(), k * self.cov2d[(1, 1)].sqrt())
    }

    pub fn cast<U: Real>(&self) -> Splat2D<U> {
        Splat2D {
            mean2d: self.mean2d.map(cast),
            cov2d: self.cov2d.map(cast),
            conic: self.conic.map(cast),
            depth: cast(self.depth),
            opacity: cast(self.opacity),
            rgb: self.rgb.map(cast),
        }
    }
}

/// Perspective Jacobian of `(fx x/z + cx, fy y/z + cy)` at a camera-space point.
pub fn perspective_jacobian<T: Real>(p: &nalgebra::Vector3<T>, fx: T, fy: T) -> Matrix2x3<T> {
    let (x, y, z) = (p.x, p.y, p.z);
    let z2 = z * z;
    Matrix2x3::new(
        fx / z,
        T::zero(),
        -fx * x / z2,
        T::zero(),
        fy / z,
        -fy * y / z2,
    )
}

/// `p` with `x/z` and `y/z` clamped to the guarded field of view.
fn guarded_point<T: Real>(
    p: &nalgebra::Vector3<T>,
    k: &crate::geometry::CameraIntrinsics<T>,
) -> nalgebra::Vector3<T> {
    let g = T::lit(FRUSTUM_GUARD);
    let half = T::lit(0.5);
    let lim_x = g * (T::lit(k.width as f64) * half) / k.fx;
    let lim_y = g * (T::lit(k.height as f64) * half) / k.fy;
    let tx = (p.x / p.z).clamp(-lim_x, lim_x);
    let ty = (p.y / p.z).clamp(-lim_y, lim_y);
    nalgebra::Vector3::new(tx * p.z, ty * p.z, p.z)
}

/// EWA projection of one Gaussian. `None` when it is outside the clip range or
/// its 3-sigma box misses the image.
pub fn project_gaussian<T: Real>(g: &Gaussian3D<T>, cam: &RenderCamera<T>) -> Option<Splat2D<T>> {
    let center = cam.pose.translation();
    let p = cam.pose.inverse_transform_point(&g.mean);
    if !(p.z > cam.near && p.z < cam.far) {
        return None;
    }
    let k = &cam.intrinsics;
    let w = cam
        .pose
        .rotation()
        .inverse()
        .to_rotation_matrix()
        .into_inner();
    let j = perspective_jacobian(&guarded_point(&p, k), k.fx, k.fy);
    let t = j * w;
    let lp = T::lit(LOW_PASS);
    let cov2d = t * g.covariance() * t.transpose() + Matrix2::new(lp, T::zero(), T::zero(), lp);
    let cov2d = (cov2d + cov2d.transpose()) * T::lit(0.5);
    let conic = cov2d.try_inverse()?;
    if !(cov2d.determinant() > T::zero()) {
        return None;
    }
    let mean2d = Vector2::new(k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy);
    let splat = Splat2D {
        mean2d,
        cov2d,
        conic,
        depth: p.z,
        opacity: g.opacity,
        rgb: g.color(&(g.mean - center)),
    };
    let e = splat.extent();
    let half = T::lit(0.5);
    let (w_px, h_px) = (T::lit(k.width as f64), T::lit(k.height as f64));
    if mean2d.x + e.x < -half
        || mean2d.x - e.x > w_px - half
        || mean2d.y + e.y < -half
        || mean2d.y - e.y > h_px - half
    {
        return None;
    }
    Some(splat)
}
