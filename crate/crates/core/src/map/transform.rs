use nalgebra::{Vector2, Vector3};

use super::{Frame, MapError, MapLayer};
use crate::geometry::Pose;
use crate::scalar::Real;

fn check_frame<T: Real>(layer: &MapLayer<T>, expected: Frame) -> Result<(), MapError> {
    match layer
        .elements
        .iter()
        .map(|e| e.frame)
        .find(|f| *f != expected)
    {
        _ if layer.frame != expected => Err(MapError::WrongFrame {
            expected,
            found: layer.frame,
        }),
        Some(found) => Err(MapError::WrongFrame { expected, found }),
        None => Ok(()),
    }
}

/// Expresses world-frame labels in the frame of `ego_pose` (ego-to-world).
/// Points are lifted to `z = 0`, mapped by the inverse pose, and `z` dropped.
pub fn world_to_ego<T: Real>(
    layer: &MapLayer<T>,
    ego_pose: &Pose<T>,
) -> Result<MapLayer<T>, MapError> {
    check_frame(layer, Frame::World)?;
    let inv = ego_pose.inverse();
    let mut out = layer.clone();
    out.frame = Frame::Ego;
    for e in &mut out.elements {
        e.frame = Frame::Ego;
        for p in &mut e.points {
            let q = inv.transform_point(&Vector3::new(p.x, p.y, T::zero()));
            *p = Vector2::new(q.x, q.y);
        }
    }
    Ok(out)
}

/// Inverse of [`world_to_ego`]: each ego point is lifted back onto the world
/// ground plane (`z_world = 0`) before the forward pose is applied. Requires
/// an ego frame that is not perpendicular to the ground.
pub fn ego_to_world<T: Real>(
    layer: &MapLayer<T>,
    ego_pose: &Pose<T>,
) -> Result<MapLayer<T>, MapError> {
    check_frame(layer, Frame::Ego)?;
    let r = ego_pose.rotation().to_rotation_matrix().into_inner();
    let t = ego_pose.translation();
    if r[(2, 2)].abs() < T::lit(1e-9) {
        return Err(MapError::DegeneratePose);
    }
    let mut out = layer.clone();
    out.frame = Frame::World;
    for e in &mut out.elements {
        e.frame = Frame::World;
        for p in &mut e.points {
            let z = -(r[(2, 0)] * p.x + r[(2, 1)] * p.y + t.z) / r[(2, 2)];
            let q = ego_pose.transform_point(&Vector3::new(p.x, p.y, z));
            *p = Vector2::new(q.x, q.y);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{MapClass, MapElement};
    use std::f64::consts::FRAC_PI_2;

    fn layer(points: &[[f64; 2]]) -> MapLayer<f64> {
        let e = MapElement::open(
            points.iter().map(|p| Vector2::new(p[0], p[1])).collect(),
            Frame::World,
            MapClass::Divider,
        )
        .unwrap();
        MapLayer::new(Frame::World, vec![e]).unwrap()
    }

    #[test]
    fn identity_pose_keeps_points() {
        let l = layer(&[[1.0, 2.0], [3.0, -4.0]]);
        let e = world_to_ego(&l, &Pose::identity()).unwrap();
        assert_eq!(e.elements[0].points, l.elements[0].points);
        assert_eq!(e.frame, Frame::Ego);
    }

    #[test]
    fn translation_subtracts() {
        let l = layer(&[[12.0, 3.0], [13.0, 3.0]]);
        let e = world_to_ego(&l, &Pose::from_translation(10.0, 0.0, 0.0)).unwrap();
        assert_eq!(e.elements[0].points[0], Vector2::new(2.0, 3.0));
    }

    #[test]
    fn yawed_ego() {
        // Oracle: 2D rotation by -yaw applied to the offset from the ego origin.
        let l = layer(&[[1.0, 0.0], [0.0, 1.0]]);
        let e = world_to_ego(&l, &Pose::from_yaw(FRAC_PI_2, Vector3::zeros())).unwrap();
        let (c, s) = (FRAC_PI_2.cos(), FRAC_PI_2.sin());
        for (w, q) in l.elements[0].points.iter().zip(&e.elements[0].points) {
            let expected = Vector2::new(c * w.x + s * w.y, -s * w.x + c * w.y);
            assert!((q - expected).norm() < 1e-12);
        }
        assert!((e.elements[0].points[0] - Vector2::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn round_trip_with_tilted_pose() {
        let l = layer(&[[5.0, 1.0], [-3.0, 7.5], [0.5, 0.25]]);
        let pose = Pose::from_axis_angle(
            Vector3::new(0.1, -0.05, 1.0),
            0.8,
            Vector3::new(3.0, -2.0, 0.4),
        );
        let back = ego_to_world(&world_to_ego(&l, &pose).unwrap(), &pose).unwrap();
        for (a, b) in l.elements[0].points.iter().zip(&back.elements[0].points) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn wrong_frame_rejected() {
        let l = layer(&[[1.0, 2.0], [3.0, -4.0]]);
        let e = world_to_ego(&l, &Pose::identity()).unwrap();
        assert!(matches!(
            world_to_ego(&e, &Pose::identity()),
            Err(MapError::WrongFrame { .. })
        ));
        assert!(ego_to_world(&l, &Pose::identity()).is_err());
    }
}
