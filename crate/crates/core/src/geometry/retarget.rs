use super::{
    target_camera_pose, target_vehicle_pose, CameraIntrinsics, Pose, RigConfig, RigOffset,
};
use crate::scalar::Real;

/// One target camera at one timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct RetargetedView<T: Real> {
    pub frame_index: usize,
    pub t: f64,
    pub camera: String,
    /// World pose of the target vehicle.
    pub vehicle_pose: Pose<T>,
    /// Camera-to-world pose of the target camera.
    pub camera_pose: Pose<T>,
    pub intrinsics: CameraIntrinsics<T>,
}

/// Target camera poses for every source vehicle pose and every camera of
/// `target_rig`, ordered by frame then rig camera order.
pub fn retarget_trajectory<T: Real>(
    source_vehicle_poses: &[(f64, Pose<T>)],
    offset: &RigOffset<T>,
    target_rig: &RigConfig<T>,
) -> Vec<RetargetedView<T>> {
    let mut views = Vec::with_capacity(source_vehicle_poses.len() * target_rig.len());
    for (frame_index, (t, source)) in source_vehicle_poses.iter().enumerate() {
        let vehicle = target_vehicle_pose(source, offset);
        for cam in &target_rig.cameras {
            views.push(RetargetedView {
                frame_index,
                t: *t,
                camera: cam.name.clone(),
                vehicle_pose: vehicle,
                camera_pose: target_camera_pose(&vehicle, cam),
                intrinsics: cam.intrinsics,
            });
        }
    }
    views
}
