use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::tables::*;
use super::{is_valid_token, PackageError};
use crate::geometry::RigConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    MissingTable,
    Parse,
    MalformedToken,
    DuplicateToken,
    DanglingReference,
    BrokenSampleLink,
    MissingFile,
    CalibrationMismatch,
    SensorCount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub table: String,
    /// Offending record (for a broken sample list, the scene token).
    pub token: String,
    pub detail: String,
}

impl Violation {
    fn new(kind: ViolationKind, table: &str, token: &str, detail: impl Into<String>) -> Self {
        Self {
            kind,
            table: table.into(),
            token: token.into(),
            detail: detail.into(),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:?} in {} [{}]: {}",
            self.kind, self.table, self.token, self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub version: Option<String>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

/// Finds the single `v1.0-*` table directory under `root`.
pub fn find_version_dir(root: &Path) -> Result<Option<PathBuf>, PackageError> {
    let io = |source| PackageError::Io {
        path: root.to_path_buf(),
        source,
    };
    let mut found: Vec<PathBuf> = Vec::new();
    for entry in std::fs::read_dir(root).map_err(io)? {
        let entry = entry.map_err(io)?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with("v1.0-") && entry.path().is_dir() {
            found.push(entry.path());
        }
    }
    found.sort();
    Ok(found.into_iter().next())
}

fn load_table<T: DeserializeOwned>(
    dir: &Path,
    name: &str,
    violations: &mut Vec<Violation>,
) -> Vec<T> {
    let path = dir.join(format!("{name}.json"));
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(_) => {
            violations.push(Violation::new(
                ViolationKind::MissingTable,
                name,
                "",
                "table file not found",
            ));
            return Vec::new();
        }
    };
    serde_json::from_str(&text).unwrap_or_else(|e| {
        violations.push(Violation::new(
            ViolationKind::Parse,
            name,
            "",
            e.to_string(),
        ));
        Vec::new()
    })
}

/// Reads and checks the dataset at `root`. Only I/O failures on `root`
/// itself are errors; every content problem is reported as a violation.
pub fn validate(root: &Path) -> Result<ValidationReport, PackageError> {
    let mut report = ValidationReport::default();
    let Some(dir) = find_version_dir(root)? else {
        report.violations.push(Violation::new(
            ViolationKind::MissingTable,
            "",
            "",
            format!("no v1.0-* table directory in {}", root.display()),
        ));
        return Ok(report);
    };
    report.version = dir.file_name().map(|s| s.to_string_lossy().into_owned());
    let v = &mut report.violations;
    let tables = Tables {
        log: load_table(&dir, "log", v),
        scene: load_table(&dir, "scene", v),
        sample: load_table(&dir, "sample", v),
        sample_data: load_table(&dir, "sample_data", v),
        ego_pose: load_table(&dir, "ego_pose", v),
        calibrated_sensor: load_table(&dir, "calibrated_sensor", v),
        sensor: load_table(&dir, "sensor", v),
    };
    let rig = match std::fs::read_to_string(dir.join(META_FILE)) {
        Ok(text) => match serde_json::from_str::<DatasetMeta>(&text) {
            Ok(meta) => match meta.rig.into_rig() {
                Ok(rig) => Some(rig),
                Err(e) => {
                    v.push(Violation::new(
                        ViolationKind::Parse,
                        META_FILE,
                        "",
                        e.to_string(),
                    ));
                    None
                }
            },
            Err(e) => {
                v.push(Violation::new(
                    ViolationKind::Parse,
                    META_FILE,
                    "",
                    e.to_string(),
                ));
                None
            }
        },
        Err(_) => None,
    };
    let mut rest = check_tables(&tables, rig.as_ref(), Some(root));
    report.violations.append(&mut rest);
    Ok(report)
}

/// In-memory checks, without file existence.
pub fn validate_tables(tables: &Tables, rig: Option<&RigConfig<f64>>) -> Vec<Violation> {
    check_tables(tables, rig, None)
}

fn token_checks<'a>(
    table: &str,
    tokens: impl Iterator<Item = &'a str>,
    out: &mut Vec<Violation>,
) -> HashSet<&'a str> {
    let mut seen = HashSet::new();
    for t in tokens {
        if !is_valid_token(t) {
            out.push(Violation::new(
                ViolationKind::MalformedToken,
                table,
                t,
                "not a 32-character hex token",
            ));
        }
        if !seen.insert(t) {
            out.push(Violation::new(
                ViolationKind::DuplicateToken,
                table,
                t,
                "token appears more than once",
            ));
        }
    }
    seen
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9)
}

fn check_tables(
    tables: &Tables,
    rig: Option<&RigConfig<f64>>,
    root: Option<&Path>,
) -> Vec<Violation> {
    use ViolationKind::*;
    let mut out = Vec::new();

    let logs = token_checks("log", tables.log.iter().map(|r| r.token.as_str()), &mut out);
    let scenes = token_checks(
        "scene",
        tables.scene.iter().map(|r| r.token.as_str()),
        &mut out,
    );
    let samples = token_checks(
        "sample",
        tables.sample.iter().map(|r| r.token.as_str()),
        &mut out,
    );
    let sds = token_checks(
        "sample_data",
        tables.sample_data.iter().map(|r| r.token.as_str()),
        &mut out,
    );
    let egos = token_checks(
        "ego_pose",
        tables.ego_pose.iter().map(|r| r.token.as_str()),
        &mut out,
    );
    let calibs = token_checks(
        "calibrated_sensor",
        tables.calibrated_sensor.iter().map(|r| r.token.as_str()),
        &mut out,
    );
    let sensors = token_checks(
        "sensor",
        tables.sensor.iter().map(|r| r.token.as_str()),
        &mut out,
    );

    let mut dangling = |table: &str,
                        token: &str,
                        field: &str,
                        target: &str,
                        set: &HashSet<&str>,
                        optional: bool| {
        if (optional && target.is_empty()) || set.contains(target) {
            return true;
        }
        out.push(Violation::new(
            DanglingReference,
            table,
            token,
            format!("{field} {target:?} does not resolve"),
        ));
        false
    };

    for r in &tables.scene {
        dangling("scene", &r.token, "log_token", &r.log_token, &logs, false);
    }
    for r in &tables.sample {
        dangling(
            "sample",
            &r.token,
            "scene_token",
            &r.scene_token,
            &scenes,
            false,
        );
    }
    let mut all_sd_samples_resolve = true;
    for r in &tables.sample_data {
        all_sd_samples_resolve &= dangling(
            "sample_data",
            &r.token,
            "sample_token",
            &r.sample_token,
            &samples,
            false,
        );
        dangling(
            "sample_data",
            &r.token,
            "ego_pose_token",
            &r.ego_pose_token,
            &egos,
            false,
        );
        dangling(
            "sample_data",
            &r.token,
            "calibrated_sensor_token",
            &r.calibrated_sensor_token,
            &calibs,
            false,
        );
        dangling("sample_data", &r.token, "prev", &r.prev, &sds, true);
        dangling("sample_data", &r.token, "next", &r.next, &sds, true);
    }
    for r in &tables.calibrated_sensor {
        dangling(
            "calibrated_sensor",
            &r.token,
            "sensor_token",
            &r.sensor_token,
            &sensors,
            false,
        );
    }

    // Sample linked lists, one verdict per scene.
    let sample_by_token: HashMap<&str, &SampleRecord> = tables
        .sample
        .iter()
        .map(|r| (r.token.as_str(), r))
        .collect();
    for scene in &tables.scene {
        if let Err(detail) = walk_scene(scene, &sample_by_token, &tables.sample) {
            out.push(Violation::new(
                BrokenSampleLink,
                "scene",
                &scene.token,
                detail,
            ));
        }
    }

    // Sensor coverage: one sample_data per channel per sample.
    let sensor_channel: HashMap<&str, &str> = tables
        .sensor
        .iter()
        .map(|s| (s.token.as_str(), s.channel.as_str()))
        .collect();
    let calib_by_token: HashMap<&str, &CalibratedSensorRecord> = tables
        .calibrated_sensor
        .iter()
        .map(|r| (r.token.as_str(), r))
        .collect();
    let channel_of = |sd: &SampleDataRecord| -> Option<&str> {
        let c = calib_by_token.get(sd.calibrated_sensor_token.as_str())?;
        sensor_channel.get(c.sensor_token.as_str()).copied()
    };
    let mut per_sample: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
    // a record with an unresolved sample or channel is already reported as dangling
    let mut coverage_known = all_sd_samples_resolve;
    for sd in &tables.sample_data {
        match channel_of(sd) {
            Some(ch) => {
                *per_sample
                    .entry(sd.sample_token.as_str())
                    .or_default()
                    .entry(ch)
                    .or_default() += 1
            }
            None => coverage_known = false,
        }
    }
    let channels: BTreeSet<&str> = tables.sensor.iter().map(|s| s.channel.as_str()).collect();
    for s in &tables.sample {
        let counts = per_sample.get(s.token.as_str());
        let dup: Vec<&str> = counts
            .map(|c| {
                c.iter()
                    .filter(|(_, &n)| n > 1)
                    .map(|(ch, _)| *ch)
                    .collect()
            })
            .unwrap_or_default();
        if !dup.is_empty() {
            out.push(Violation::new(
                SensorCount,
                "sample",
                &s.token,
                format!("duplicate channels {dup:?}"),
            ));
        }
        if coverage_known {
            let missing: Vec<&str> = channels
                .iter()
                .filter(|ch| counts.is_none_or(|c| !c.contains_key(*ch)))
                .copied()
                .collect();
            if !missing.is_empty() {
                out.push(Violation::new(
                    SensorCount,
                    "sample",
                    &s.token,
                    format!("missing channels {missing:?}"),
                ));
            }
        }
    }

    if let Some(rig) = rig {
        if !tables.scene.is_empty() {
            let expected = rig.len() + 1;
            if tables.sensor.len() != expected {
                out.push(Violation::new(
                    SensorCount,
                    "sensor",
                    "",
                    format!("{} sensors, rig declares {}", tables.sensor.len(), expected),
                ));
            }
        }
        for c in &tables.calibrated_sensor {
            let Some(&channel) = sensor_channel.get(c.sensor_token.as_str()) else {
                continue;
            };
            let (rot, trans, k) = if channel == LIDAR_CHANNEL {
                let e = &rig.lidar_extrinsic;
                (e.rotation_wxyz(), e.translation_xyz(), Vec::new())
            } else if let Some(cam) = rig.camera(channel) {
                let e = &cam.extrinsic;
                (
                    e.rotation_wxyz(),
                    e.translation_xyz(),
                    cam.intrinsics.matrix().to_vec(),
                )
            } else {
                out.push(Violation::new(
                    CalibrationMismatch,
                    "calibrated_sensor",
                    &c.token,
                    format!("channel {channel} is not part of rig {}", rig.rig_name),
                ));
                continue;
            };
            let k_flat: Vec<f64> = k.iter().flatten().copied().collect();
            let c_flat: Vec<f64> = c.camera_intrinsic.iter().flatten().copied().collect();
            if !close(&rot, &c.rotation)
                || !close(&trans, &c.translation)
                || !close(&k_flat, &c_flat)
            {
                out.push(Violation::new(
                    CalibrationMismatch,
                    "calibrated_sensor",
                    &c.token,
                    format!("{channel} calibration differs from the declared rig"),
                ));
            }
        }
        for sd in &tables.sample_data {
            let Some(cam) = channel_of(sd).and_then(|ch| rig.camera(ch)) else {
                continue;
            };
            if sd.width != cam.intrinsics.width || sd.height != cam.intrinsics.height {
                out.push(Violation::new(
                    CalibrationMismatch,
                    "sample_data",
                    &sd.token,
                    format!(
                        "image size {}x{} but {} is {}x{}",
                        sd.width, sd.height, cam.name, cam.intrinsics.width, cam.intrinsics.height
                    ),
                ));
            }
        }
    }

    if let Some(root) = root {
        for sd in &tables.sample_data {
            if !root.join(&sd.filename).is_file() {
                out.push(Violation::new(
                    MissingFile,
                    "sample_data",
                    &sd.token,
                    format!("{} not found", sd.filename),
                ));
            }
        }
    }
    out
}

fn walk_scene(
    scene: &SceneRecord,
    by_token: &HashMap<&str, &SampleRecord>,
    all: &[SampleRecord],
) -> Result<(), String> {
    let members = all.iter().filter(|s| s.scene_token == scene.token).count();
    if members != scene.nbr_samples {
        return Err(format!(
            "scene lists {} samples, table has {}",
            scene.nbr_samples, members
        ));
    }
    if scene.nbr_samples == 0 {
        return if scene.first_sample_token.is_empty() && scene.last_sample_token.is_empty() {
            Ok(())
        } else {
            Err("empty scene names first/last samples".into())
        };
    }
    let mut prev = "";
    let mut cur = scene.first_sample_token.as_str();
    let mut visited = 0usize;
    let mut last = "";
    while !cur.is_empty() {
        let Some(s) = by_token.get(cur) else {
            return Err(format!("link to unknown sample {cur:?}"));
        };
        if s.scene_token != scene.token {
            return Err(format!("sample {cur} belongs to another scene"));
        }
        if s.prev != prev {
            return Err(format!(
                "sample {cur} has prev {:?}, expected {prev:?}",
                s.prev
            ));
        }
        visited += 1;
        if visited > scene.nbr_samples {
            return Err("sample list is longer than nbr_samples or cyclic".into());
        }
        last = cur;
        prev = cur;
        cur = s.next.as_str();
    }
    if visited != scene.nbr_samples {
        return Err(format!("walked {visited} of {} samples", scene.nbr_samples));
    }
    if last != scene.last_sample_token {
        return Err(format!(
            "list ends at {last}, scene says {}",
            scene.last_sample_token
        ));
    }
    Ok(())
}
