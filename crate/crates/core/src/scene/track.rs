use nalgebra::Vector3;

use super::SceneError;
use crate::geometry::Pose;
use crate::scalar::Real;

/// Queries this far outside a track's keyframe span still resolve (clamped).
pub const TRACK_TIME_TOLERANCE_S: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct Keyframe<T: Real> {
    pub t: T,
    /// Object-to-world box pose.
    pub pose: Pose<T>,
    /// Box length, width, height in meters.
    pub size: Vector3<T>,
}

/// Time-indexed box poses of one rigid object.
#[derive(Debug, Clone, PartialEq)]
pub struct Track<T: Real> {
    pub track_id: String,
    keyframes: Vec<Keyframe<T>>,
}

impl<T: Real> Track<T> {
    pub fn new(
        track_id: impl Into<String>,
        keyframes: Vec<Keyframe<T>>,
    ) -> Result<Self, SceneError> {
        let track_id = track_id.into();
        if keyframes.is_empty() {
            return Err(SceneError::Invariant {
                what: format!("track {track_id:?} has no keyframes"),
                index: 0,
            });
        }
        for (i, pair) in keyframes.windows(2).enumerate() {
            if !(pair[1].t > pair[0].t) {
                return Err(SceneError::Invariant {
                    what: format!("track {track_id:?} timestamps not strictly increasing"),
                    index: i + 1,
                });
            }
        }
        Ok(Self {
            track_id,
            keyframes,
        })
    }

    pub fn keyframes(&self) -> &[Keyframe<T>] {
        &self.keyframes
    }

    pub fn time_range(&self) -> (T, T) {
        (
            self.keyframes[0].t,
            self.keyframes[self.keyframes.len() - 1].t,
        )
    }

    /// Largest box extent over all keyframes.
    pub fn max_size(&self) -> Vector3<T> {
        self.keyframes
            .iter()
            .fold(Vector3::zeros(), |acc, k| acc.sup(&k.size))
    }

    pub fn pose_at(&self, t: T) -> Result<Pose<T>, SceneError> {
        object_pose_at(self, t)
    }
}

/// Box pose at time `t`: linear in translation, slerp in rotation, clamped
/// to the end keyframes within [`TRACK_TIME_TOLERANCE_S`].
pub fn object_pose_at<T: Real>(track: &Track<T>, t: T) -> Result<Pose<T>, SceneError> {
    let (first, last) = track.time_range();
    let tol = T::lit(TRACK_TIME_TOLERANCE_S);
    if !t.is_finite_real() || t < first - tol || t > last + tol {
        return Err(SceneError::OutOfTrackRange {
            track_id: track.track_id.clone(),
            t: t.as_f64(),
            first: first.as_f64(),
            last: last.as_f64(),
        });
    }
    let kfs = &track.keyframes;
    if t <= first {
        return Ok(kfs[0].pose);
    }
    if t >= last {
        return Ok(kfs[kfs.len() - 1].pose);
    }
    // first index whose time exceeds t; t lies in [kfs[i-1].t, kfs[i].t)
    let i = kfs.partition_point(|k| k.t <= t);
    let (a, b) = (&kfs[i - 1], &kfs[i]);
    if t == a.t {
        return Ok(a.pose);
    }
    let alpha = (t - a.t) / (b.t - a.t);
    let translation = a.pose.translation().lerp(b.pose.translation(), alpha);
    let qa = *a.pose.rotation();
    let mut qb = *b.pose.rotation();
    if qa.coords.dot(&qb.coords) < T::zero() {
        qb = nalgebra::Unit::new_unchecked(-qb.into_inner());
    }
    let rotation = qa
        .try_slerp(&qb, alpha, T::lit(1e-12))
        .unwrap_or_else(|| qa.nlerp(&qb, alpha));
    Ok(Pose::from_parts(rotation, translation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn kf(t: f64, yaw: f64, x: f64) -> Keyframe<f64> {
        Keyframe {
            t,
            pose: Pose::from_yaw(yaw, Vector3::new(x, 0.0, 0.0)),
            size: Vector3::new(4.0, 2.0, 1.5),
        }
    }

    #[test]
    fn exact_at_keyframes() {
        let track = Track::new(
            "a",
            vec![kf(0.0, 0.0, 0.0), kf(2.0, 0.5, 4.0), kf(3.0, 0.7, 5.0)],
        )
        .unwrap();
        for k in track.keyframes() {
            assert_eq!(object_pose_at(&track, k.t).unwrap(), k.pose);
        }
    }

    #[test]
    fn midpoint_translation() {
        let track = Track::new("a", vec![kf(0.0, 0.0, 0.0), kf(2.0, 0.0, 4.0)]).unwrap();
        let p = object_pose_at(&track, 1.0).unwrap();
        assert!((p.translation().x - 2.0).abs() < 1e-12);
    }

    #[test]
    fn clamps_within_tolerance_and_errors_beyond() {
        let track = Track::new("a", vec![kf(1.0, 0.0, 0.0), kf(2.0, 0.0, 4.0)]).unwrap();
        assert_eq!(
            object_pose_at(&track, 0.95).unwrap(),
            track.keyframes()[0].pose
        );
        assert_eq!(
            object_pose_at(&track, 2.05).unwrap(),
            track.keyframes()[1].pose
        );
        assert!(matches!(
            object_pose_at(&track, 0.85),
            Err(SceneError::OutOfTrackRange { .. })
        ));
        assert!(object_pose_at(&track, 2.2).is_err());
    }

    #[test]
    fn rejects_bad_tracks() {
        assert!(Track::<f64>::new("a", vec![]).is_err());
        assert!(Track::new("a", vec![kf(1.0, 0.0, 0.0), kf(1.0, 0.0, 0.0)]).is_err());
    }

    #[test]
    fn slerp_midpoint_yaw() {
        // Oracle: for rotations about one axis the geodesic midpoint is the
        // rotation by half the relative angle, R_a * exp(0.5 * log(R_a^T R_b)).
        let track = Track::new("a", vec![kf(0.0, 0.0, 0.0), kf(1.0, FRAC_PI_2, 0.0)]).unwrap();
        let p = object_pose_at(&track, 0.5).unwrap();
        let ra = track.keyframes()[0].pose.rotation().to_rotation_matrix();
        let rb = track.keyframes()[1].pose.rotation().to_rotation_matrix();
        let rel = ra.inverse() * rb;
        let log = rel.scaled_axis();
        let expected = ra * nalgebra::Rotation3::new(log * 0.5);
        let got = p.rotation().to_rotation_matrix();
        assert!((got.matrix() - expected.matrix()).norm() < 1e-12);
        assert!((p.yaw() - FRAC_PI_2 / 2.0).abs() < 1e-12);
    }
}
