mod common;

use common::*;
use crossrig::geometry::{
    retarget_trajectory, target_camera_pose, target_vehicle_pose, CameraDef, CameraIntrinsics,
    Pose, RigConfig, RigOffset,
};
use nalgebra::Vector3;
use proptest::prelude::*;

fn arb_pose() -> impl Strategy<Value = Pose<f64>> {
    (
        prop::array::uniform4(-1.0f64..1.0),
        prop::array::uniform3(-50.0f64..50.0),
    )
        .prop_filter_map("degenerate quaternion", |(q, t)| Pose::from_wxyz(q, t).ok())
}

fn close(a: &Pose<f64>, b: &Pose<f64>, tol: f64) -> bool {
    let (angle, dist) = a.distance_to(b);
    angle < tol && dist < tol
}

proptest! {
    #[test]
    fn inverse_cancels(p in arb_pose()) {
        prop_assert!(close(&p.inverse().compose(&p), &Pose::identity(), 1e-9));
        prop_assert!(close(&p.compose(&p.inverse()), &Pose::identity(), 1e-9));
    }

    #[test]
    fn composition_is_associative(a in arb_pose(), b in arb_pose(), c in arb_pose()) {
        prop_assert!(close(&a.compose(&b).compose(&c), &a.compose(&b.compose(&c)), 1e-9));
    }

    #[test]
    fn compose_matches_matrix_product(a in arb_pose(), b in arb_pose()) {
        let m = matmul(&matrix_of(&a), &matrix_of(&b));
        prop_assert!(max_abs_diff(&matrix_of(&a.compose(&b)), &m) < 1e-9);
    }

    #[test]
    fn transform_point_inverts(p in arb_pose(), x in prop::array::uniform3(-100.0f64..100.0)) {
        let v = Vector3::from(x);
        prop_assert!((p.inverse_transform_point(&p.transform_point(&v)) - v).norm() < 1e-9);
    }

    #[test]
    fn identity_offset_keeps_vehicle_pose(p in arb_pose()) {
        let vt = target_vehicle_pose(&p, &RigOffset::identity());
        prop_assert!(close(&vt, &p, 1e-12));
    }
}

#[test]
fn rear_axle_offset_lowers_every_camera() {
    let mut r = rng(3);
    let cams: Vec<CameraDef<f64>> = (0..6)
        .map(|i| CameraDef {
            name: format!("cam{i}"),
            intrinsics: CameraIntrinsics::new(500.0, 500.0, 320.0, 240.0, 640, 480).unwrap(),
            extrinsic: random_pose(&mut r, 2.0),
        })
        .collect();
    let rig = RigConfig::new("t", cams, "").unwrap();
    // level vehicle poses: the vertical offset maps to a pure world-z shift
    let traj: Vec<(f64, Pose<f64>)> = (0..5)
        .map(|k| {
            (
                k as f64,
                Pose::from_yaw(0.3 * k as f64, Vector3::new(k as f64, 2.0, 0.33)),
            )
        })
        .collect();
    let base = retarget_trajectory(&traj, &RigOffset::identity(), &rig);
    let lowered = retarget_trajectory(&traj, &RigOffset::vertical(0.33), &rig);
    for (a, b) in base.iter().zip(&lowered) {
        let (ta, tb) = (a.camera_pose.translation(), b.camera_pose.translation());
        assert!((tb.z - (ta.z - 0.33)).abs() < 1e-12);
        assert!((tb.x - ta.x).abs() < 1e-12 && (tb.y - ta.y).abs() < 1e-12);
        let (angle, _) = a.camera_pose.distance_to(&b.camera_pose);
        assert!(angle < 1e-12);
    }
}

#[test]
fn camera_chain_matches_matrices() {
    let mut r = rng(11);
    for _ in 0..200 {
        let (g_vs, vs_vt, vt_ct) = (
            random_pose(&mut r, 100.0),
            random_pose(&mut r, 2.0),
            random_pose(&mut r, 3.0),
        );
        let cam = CameraDef {
            name: "c".into(),
            intrinsics: CameraIntrinsics::new(500.0, 500.0, 320.0, 240.0, 640, 480).unwrap(),
            extrinsic: vt_ct,
        };
        let got = target_camera_pose(&target_vehicle_pose(&g_vs, &RigOffset::new(vs_vt)), &cam);
        let want = matmul(
            &matmul(&matrix_of(&g_vs), &matrix_of(&vs_vt)),
            &matrix_of(&vt_ct),
        );
        assert!(max_abs_diff(&matrix_of(&got), &want) < 1e-9);
    }
}
