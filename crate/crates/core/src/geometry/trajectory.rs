//! Timestamped vehicle poses, one JSON object per line.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GeometryError, Pose};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub rotation_wxyz: [f64; 4],
    pub translation_xyz_m: [f64; 3],
}

pub type Trajectory = Vec<(f64, Pose<f64>)>;

/// Parses JSONL poses; blank lines are skipped and timestamps must increase.
pub fn parse_trajectory(text: &str) -> Result<Trajectory, GeometryError> {
    let mut out: Trajectory = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let r: TrajectoryRecord = serde_json::from_str(line)?;
        if !r.t.is_finite() {
            return Err(GeometryError::NonFinite("timestamp"));
        }
        if let Some((prev, _)) = out.last() {
            if !(r.t > *prev) {
                return Err(GeometryError::NonMonotonic {
                    t: r.t,
                    prev: *prev,
                });
            }
        }
        out.push((r.t, Pose::from_wxyz(r.rotation_wxyz, r.translation_xyz_m)?));
    }
    Ok(out)
}

/// Keeps the first pose and then every pose at least `1 / hz` seconds after
/// the last kept one.
pub fn subsample_trajectory(poses: &[(f64, Pose<f64>)], hz: f64) -> Trajectory {
    let period = 1.0 / hz;
    let mut out: Trajectory = Vec::new();
    for (t, p) in poses {
        match out.last() {
            Some((last, _)) if t - last < period - 1e-6 => {}
            _ => out.push((*t, *p)),
        }
    }
    out
}

pub fn trajectory_to_jsonl(poses: &[(f64, Pose<f64>)]) -> String {
    let mut s = String::new();
    for (t, p) in poses {
        let r = TrajectoryRecord {
            t: *t,
            rotation_wxyz: p.rotation_wxyz(),
            translation_xyz_m: p.translation_xyz(),
        };
        s.push_str(&serde_json::to_string(&r).expect("plain record"));
        s.push('\n');
    }
    s
}

pub fn load_trajectory(path: impl AsRef<Path>) -> Result<Trajectory, GeometryError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| GeometryError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_trajectory(&text)
}

pub fn save_trajectory(
    poses: &[(f64, Pose<f64>)],
    path: impl AsRef<Path>,
) -> Result<(), GeometryError> {
    let path = path.as_ref();
    std::fs::write(path, trajectory_to_jsonl(poses)).map_err(|source| GeometryError::Io {
        path: path.to_path_buf(),
        source,
    })
}
