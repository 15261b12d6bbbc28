use std::ops::Mul;

use nalgebra::{Quaternion, Unit, UnitQuaternion, Vector3};

use super::GeometryError;
use crate::scalar::{cast, Real};

/// Rigid transform stored as a unit quaternion and a translation.
///
/// A pose `a_T_b` maps coordinates expressed in frame `b` into frame `a`:
/// `p_a = R * p_b + t`. The quaternion is renormalized on every construction
/// and composition and kept in the `w >= 0` hemisphere so equal rotations
/// compare equal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose<T: Real> {
    rotation: UnitQuaternion<T>,
    translation: Vector3<T>,
}

impl<T: Real> Default for Pose<T> {
    fn default() -> Self {
        Self::identity()
    }
}

fn canonical<T: Real>(q: Quaternion<T>) -> UnitQuaternion<T> {
    let q = if q.w < T::zero() { -q } else { q };
    UnitQuaternion::new_normalize(q)
}

impl<T: Real> Pose<T> {
    pub fn identity() -> Self {
        Self {
            rotation: UnitQuaternion::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Builds a pose from a `(w, x, y, z)` quaternion that need not be normalized.
    pub fn from_wxyz(rotation_wxyz: [T; 4], translation: [T; 3]) -> Result<Self, GeometryError> {
        let [w, x, y, z] = rotation_wxyz;
        let q = Quaternion::new(w, x, y, z);
        let norm = q.norm();
        if !norm.is_finite_real() || norm < T::lit(1e-12) {
            return Err(GeometryError::InvalidQuaternion(
                rotation_wxyz.map(|v| v.as_f64()),
            ));
        }
        if translation.iter().any(|v| !v.is_finite_real()) {
            return Err(GeometryError::NonFinite("translation"));
        }
        Ok(Self {
            rotation: canonical(q),
            translation: Vector3::from(translation),
        })
    }

    pub fn from_parts(rotation: UnitQuaternion<T>, translation: Vector3<T>) -> Self {
        Self {
            rotation: canonical(rotation.into_inner()),
            translation,
        }
    }

    pub fn from_translation(x: T, y: T, z: T) -> Self {
        Self {
            rotation: UnitQuaternion::identity(),
            translation: Vector3::new(x, y, z),
        }
    }

    /// Rotation about +z by `yaw` radians followed by a translation.
    pub fn from_yaw(yaw: T, translation: Vector3<T>) -> Self {
        Self::from_parts(
            UnitQuaternion::from_axis_angle(&Vector3::z_axis(), yaw),
            translation,
        )
    }

    pub fn from_axis_angle(axis: Vector3<T>, angle: T, translation: Vector3<T>) -> Self {
        let axis = Unit::try_new(axis, T::lit(1e-12));
        let rotation = match axis {
            Some(axis) => UnitQuaternion::from_axis_angle(&axis, angle),
            None => UnitQuaternion::identity(),
        };
        Self::from_parts(rotation, translation)
    }

    #[inline]
    pub fn rotation(&self) -> &UnitQuaternion<T> {
        &self.rotation
    }

    #[inline]
    pub fn translation(&self) -> &Vector3<T> {
        &self.translation
    }

    pub fn rotation_wxyz(&self) -> [T; 4] {
        let q = self.rotation.quaternion();
        [q.w, q.i, q.j, q.k]
    }

    pub fn translation_xyz(&self) -> [T; 3] {
        [self.translation.x, self.translation.y, self.translation.z]
    }

    /// `self * other`: applies `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        let rotation = self.rotation.quaternion() * other.rotation.quaternion();
        Self {
            rotation: canonical(rotation),
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> Self {
        let rotation = self.rotation.inverse();
        Self {
            translation: -(rotation * self.translation),
            rotation: canonical(rotation.into_inner()),
        }
    }

    #[inline]
    pub fn transform_point(&self, p: &Vector3<T>) -> Vector3<T> {
        self.rotation * p + self.translation
    }

    #[inline]
    pub fn transform_vector(&self, v: &Vector3<T>) -> Vector3<T> {
        self.rotation * v
    }

    /// Maps a point from the target frame back into the source frame.
    #[inline]
    pub fn inverse_transform_point(&self, p: &Vector3<T>) -> Vector3<T> {
        self.rotation
            .inverse_transform_vector(&(p - self.translation))
    }

    /// Rotation angle (radians) and translation distance between two poses.
    pub fn distance_to(&self, other: &Self) -> (T, T) {
        let angle = self.rotation.angle_to(&other.rotation);
        (angle, (self.translation - other.translation).norm())
    }

    pub fn yaw(&self) -> T {
        self.rotation.euler_angles().2
    }

    pub fn cast<U: Real>(&self) -> Pose<U> {
        let q = self.rotation.quaternion();
        Pose {
            rotation: canonical(Quaternion::new(cast(q.w), cast(q.i), cast(q.j), cast(q.k))),
            translation: self.translation.map(cast),
        }
    }
}

impl<T: Real> Mul for Pose<T> {
    type Output = Pose<T>;

    fn mul(self, rhs: Pose<T>) -> Pose<T> {
        self.compose(&rhs)
    }
}

impl<'a, T: Real> Mul<&'a Pose<T>> for &'a Pose<T> {
    type Output = Pose<T>;

    fn mul(self, rhs: &'a Pose<T>) -> Pose<T> {
        self.compose(rhs)
    }
}
