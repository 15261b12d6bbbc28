use nalgebra::{Matrix3, UnitQuaternion, Vector3};

use super::SceneError;
use crate::geometry::Pose;
use crate::scalar::{cast, Real};

const SH_C0: f64 = 0.282_094_791_773_878_14;
const SH_C1: f64 = 0.488_602_511_902_919_9;
const SH_C2: [f64; 5] = [
    1.092_548_430_592_079_2,
    -1.092_548_430_592_079_2,
    0.315_391_565_252_520_05,
    -1.092_548_430_592_079_2,
    0.546_274_215_296_039_6,
];
const SH_C3: [f64; 7] = [
    -0.590_043_589_926_643_5,
    2.890_611_442_640_554,
    -0.457_045_799_464_465_8,
    0.373_176_332_590_115_4,
    -0.457_045_799_464_465_8,
    1.445_305_721_320_277,
    -0.590_043_589_926_643_5,
];

/// Number of SH coefficients per channel for degrees 0..=3.
pub const SH_COUNTS: [usize; 4] = [1, 4, 9, 16];

/// An anisotropic 3D Gaussian with factored covariance `R diag(s^2) R^T` and
/// spherical-harmonic color (`sh[k]` holds the RGB triple of coefficient `k`).
#[derive(Debug, Clone, PartialEq)]
pub struct Gaussian3D<T: Real> {
    pub mean: Vector3<T>,
    pub scale: Vector3<T>,
    pub rotation: UnitQuaternion<T>,
    pub opacity: T,
    pub sh: Vec<[T; 3]>,
}

impl<T: Real> Gaussian3D<T> {
    pub fn new(
        mean: Vector3<T>,
        scale: Vector3<T>,
        rotation: UnitQuaternion<T>,
        opacity: T,
        sh: Vec<[T; 3]>,
    ) -> Result<Self, SceneError> {
        let g = Self {
            mean,
            scale,
            rotation,
            opacity,
            sh,
        };
        g.check().map_err(|what| SceneError::Invariant {
            what: what.to_string(),
            index: 0,
        })?;
        Ok(g)
    }

    /// A Gaussian whose color is constant in every direction.
    pub fn with_rgb(
        mean: Vector3<T>,
        scale: Vector3<T>,
        rotation: UnitQuaternion<T>,
        opacity: T,
        rgb: [T; 3],
    ) -> Result<Self, SceneError> {
        Self::new(mean, scale, rotation, opacity, vec![rgb_to_sh_dc(rgb)])
    }

    pub(crate) fn check(&self) -> Result<(), &'static str> {
        if self.mean.iter().any(|v| !v.is_finite_real()) {
            return Err("non-finite mean");
        }
        if self
            .scale
            .iter()
            .any(|&s| !(s > T::zero()) || !s.is_finite_real())
        {
            return Err("scale components must be positive");
        }
        if !(self.opacity >= T::zero() && self.opacity <= T::one()) {
            return Err("opacity outside [0, 1]");
        }
        if !SH_COUNTS.contains(&self.sh.len()) {
            return Err("SH coefficient count must be 1, 4, 9 or 16");
        }
        if self.sh.iter().flatten().any(|v| !v.is_finite_real()) {
            return Err("non-finite SH coefficient");
        }
        Ok(())
    }

    pub fn sh_degree(&self) -> usize {
        SH_COUNTS
            .iter()
            .position(|&n| n == self.sh.len())
            .unwrap_or(0)
    }

    /// World-space covariance.
    pub fn covariance(&self) -> Matrix3<T> {
        let r = self.rotation.to_rotation_matrix().into_inner();
        let s2 = Matrix3::from_diagonal(&self.scale.component_mul(&self.scale));
        r * s2 * r.transpose()
    }

    /// Color seen along `dir` (from the viewer towards the Gaussian), clamped to `[0, 1]`.
    pub fn color(&self, dir: &Vector3<T>) -> [T; 3] {
        let n = dir.norm();
        let d = if n > T::zero() { dir / n } else { *dir };
        eval_sh(&self.sh, &d).map(|c| c.clamp(T::zero(), T::one()))
    }

    /// Applies a rigid transform: mean transformed, rotation left-multiplied,
    /// scale kept. Degree-1 SH is rotated with the pose; higher bands are left
    /// as they are.
    pub fn transformed(&self, pose: &Pose<T>) -> Self {
        let mut sh = self.sh.clone();
        if sh.len() >= 4 {
            let r = pose.rotation();
            for c in 0..3 {
                let v = Vector3::new(-sh[3][c], -sh[1][c], sh[2][c]);
                let v = r * v;
                sh[1][c] = -v.y;
                sh[2][c] = v.z;
                sh[3][c] = -v.x;
            }
        }
        Self {
            mean: pose.transform_point(&self.mean),
            scale: self.scale,
            rotation: pose.rotation() * self.rotation,
            opacity: self.opacity,
            sh,
        }
    }

    pub fn cast<U: Real>(&self) -> Gaussian3D<U> {
        let q = self.rotation.quaternion();
        Gaussian3D {
            mean: self.mean.map(cast),
            scale: self.scale.map(cast),
            rotation: UnitQuaternion::new_normalize(nalgebra::Quaternion::new(
                cast(q.w),
                cast(q.i),
                cast(q.j),
                cast(q.k),
            )),
            opacity: cast(self.opacity),
            sh: self.sh.iter().map(|c| c.map(cast)).collect(),
        }
    }
}

/// DC coefficient reproducing a constant color.
pub fn rgb_to_sh_dc<T: Real>(rgb: [T; 3]) -> [T; 3] {
    rgb.map(|c| (c - T::lit(0.5)) / T::lit(SH_C0))
}

/// Evaluates real SH of degree 0..=3 at unit direction `d`, with the usual
/// `+0.5` offset. Not clamped.
pub fn eval_sh<T: Real>(sh: &[[T; 3]], d: &Vector3<T>) -> [T; 3] {
    let mut out = [T::zero(); 3];
    let (x, y, z) = (d.x, d.y, d.z);
    let mut basis: [T; 16] = [T::zero(); 16];
    basis[0] = T::lit(SH_C0);
    if sh.len() >= 4 {
        let c1 = T::lit(SH_C1);
        basis[1] = -c1 * y;
        basis[2] = c1 * z;
        basis[3] = -c1 * x;
    }
    if sh.len() >= 9 {
        let (xx, yy, zz) = (x * x, y * y, z * z);
        let two = T::lit(2.0);
        basis[4] = T::lit(SH_C2[0]) * x * y;
        basis[5] = T::lit(SH_C2[1]) * y * z;
        basis[6] = T::lit(SH_C2[2]) * (two * zz - xx - yy);
        basis[7] = T::lit(SH_C2[3]) * x * z;
        basis[8] = T::lit(SH_C2[4]) * (xx - yy);
    }
    if sh.len() >= 16 {
        let (xx, yy, zz) = (x * x, y * y, z * z);
        let (two, three, four) = (T::lit(2.0), T::lit(3.0), T::lit(4.0));
        basis[9] = T::lit(SH_C3[0]) * y * (three * xx - yy);
        basis[10] = T::lit(SH_C3[1]) * x * y * z;
        basis[11] = T::lit(SH_C3[2]) * y * (four * zz - xx - yy);
        basis[12] = T::lit(SH_C3[3]) * z * (two * zz - three * xx - three * yy);
        basis[13] = T::lit(SH_C3[4]) * x * (four * zz - xx - yy);
        basis[14] = T::lit(SH_C3[5]) * z * (xx - yy);
        basis[15] = T::lit(SH_C3[6]) * x * (xx - three * yy);
    }
    for (coef, b) in sh.iter().zip(basis.iter()) {
        for c in 0..3 {
            out[c] += coef[c] * *b;
        }
    }
    out.map(|v| v + T::lit(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(sh: Vec<[f64; 3]>) -> Gaussian3D<f64> {
        Gaussian3D::new(
            Vector3::zeros(),
            Vector3::new(1.0, 2.0, 3.0),
            UnitQuaternion::from_euler_angles(0.1, 0.2, 0.3),
            0.5,
            sh,
        )
        .unwrap()
    }

    #[test]
    fn dc_color_round_trip() {
        let gauss = Gaussian3D::with_rgb(
            Vector3::zeros(),
            Vector3::repeat(1.0),
            UnitQuaternion::identity(),
            1.0,
            [0.2, 0.4, 0.9],
        )
        .unwrap();
        let c = gauss.color(&Vector3::new(0.3, -1.0, 2.0));
        for (a, b) in c.iter().zip([0.2f64, 0.4, 0.9]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn invariants_are_checked() {
        let bad_scale = Gaussian3D::new(
            Vector3::zeros(),
            Vector3::new(0.0, 1.0, 1.0),
            UnitQuaternion::identity(),
            0.5,
            vec![[0.0; 3]],
        );
        assert!(bad_scale.is_err());
        let bad_sh = Gaussian3D::new(
            Vector3::zeros(),
            Vector3::repeat(1.0),
            UnitQuaternion::identity(),
            0.5,
            vec![[0.0; 3]; 3],
        );
        assert!(bad_sh.is_err());
        let bad_opacity = Gaussian3D::new(
            Vector3::zeros(),
            Vector3::repeat(1.0),
            UnitQuaternion::identity(),
            1.5,
            vec![[0.0; 3]],
        );
        assert!(bad_opacity.is_err());
    }

    #[test]
    fn covariance_determinant_is_product_of_variances() {
        let gauss = g(vec![[0.0; 3]]);
        let det = gauss.covariance().determinant();
        assert!((det - 36.0).abs() < 1e-9);
    }

    #[test]
    fn band_one_rotation_is_equivariant() {
        // f_world(R d) must equal f_local(d) for degree-1 SH.
        let sh = vec![
            [0.1, 0.2, 0.3],
            [0.4, -0.2, 0.1],
            [-0.3, 0.5, 0.2],
            [0.25, 0.1, -0.4],
        ];
        let local = g(sh);
        let pose = Pose::from_axis_angle(
            Vector3::new(0.3, -0.5, 0.8),
            1.1,
            Vector3::new(1.0, 2.0, 3.0),
        );
        let world = local.transformed(&pose);
        let d = Vector3::new(0.2, -0.7, 0.4).normalize();
        let a = eval_sh(&local.sh, &d);
        let b = eval_sh(&world.sh, &pose.transform_vector(&d));
        for c in 0..3 {
            assert!((a[c] - b[c]).abs() < 1e-12);
        }
    }

    #[test]
    fn transform_preserves_covariance_determinant() {
        let local = g(vec![[0.0; 3]]);
        let pose = Pose::from_axis_angle(
            Vector3::new(1.0, 1.0, 0.0),
            0.7,
            Vector3::new(3.0, 0.0, 0.0),
        );
        let world = local.transformed(&pose);
        let (a, b) = (
            local.covariance().determinant(),
            world.covariance().determinant(),
        );
        assert!(((a - b) / a).abs() < 1e-9);
        assert!((world.mean - Vector3::new(3.0, 0.0, 0.0)).norm() < 1e-12);
    }
}
