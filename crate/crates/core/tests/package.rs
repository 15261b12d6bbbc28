//! Packaging closure and validator fault injection.

use std::path::{Path, PathBuf};

use crossrig::package::{
    frames_from_render_manifest, package, validate, PackageError, PackageOptions, SampleDataRecord,
    SampleRecord, SceneInput, ViolationKind,
};
use crossrig::render::{render_rig, RenderOptions};
use crossrig::synth::{SynthOptions, SyntheticWorld};

struct Fixture {
    _tmp: tempfile::TempDir,
    world: SyntheticWorld,
    scene: SceneInput,
    root: PathBuf,
}

fn fixture() -> Fixture {
    let tmp = tempfile::tempdir().unwrap();
    let world = SyntheticWorld::generate(&SynthOptions {
        ground_nx: 10,
        ground_ny: 6,
        frames: 3,
        width: 24,
        height: 16,
        ..SynthOptions::default()
    })
    .unwrap();
    let render_dir = tmp.path().join("render");
    let manifest = render_rig(
        &world.scene,
        &world.trajectory,
        &world.offset,
        &world.target_rig,
        &render_dir,
        &RenderOptions::default(),
    )
    .unwrap();
    let scene = SceneInput {
        name: "road".into(),
        frames: frames_from_render_manifest(&manifest, &render_dir, &world.target_rig).unwrap(),
        world_map: Some(world.world_map.clone()),
    };
    let root = tmp.path().join("ds");
    package(
        std::slice::from_ref(&scene),
        &world.target_rig,
        &PackageOptions::default(),
        &root,
    )
    .unwrap();
    Fixture {
        _tmp: tmp,
        world,
        scene,
        root,
    }
}

fn table_path(root: &Path, name: &str) -> PathBuf {
    root.join("v1.0-crossrig").join(format!("{name}.json"))
}

fn read<T: serde::de::DeserializeOwned>(root: &Path, name: &str) -> Vec<T> {
    serde_json::from_str(&std::fs::read_to_string(table_path(root, name)).unwrap()).unwrap()
}

fn write<T: serde::Serialize>(root: &Path, name: &str, rows: &[T]) {
    std::fs::write(table_path(root, name), serde_json::to_string(rows).unwrap()).unwrap();
}

#[test]
fn fresh_dataset_is_clean_and_reproducible() {
    let f = fixture();
    assert!(validate(&f.root).unwrap().is_ok());
    let again = f.root.with_file_name("ds2");
    package(
        std::slice::from_ref(&f.scene),
        &f.world.target_rig,
        &PackageOptions::default(),
        &again,
    )
    .unwrap();
    for t in [
        "sample",
        "sample_data",
        "ego_pose",
        "calibrated_sensor",
        "sensor",
        "scene",
        "log",
    ] {
        assert_eq!(
            std::fs::read(table_path(&f.root, t)).unwrap(),
            std::fs::read(table_path(&again, t)).unwrap(),
            "{t}"
        );
    }
    let samples: Vec<SampleRecord> = read(&f.root, "sample");
    assert_eq!(samples.len(), 3);
    assert_eq!(samples[0].timestamp, 0);
    assert_eq!(samples[1].timestamp, 500_000);
    let sd: Vec<SampleDataRecord> = read(&f.root, "sample_data");
    assert_eq!(sd.len(), 3 * (f.world.target_rig.len() + 1));
}

#[test]
fn deleted_image_is_one_missing_file() {
    let f = fixture();
    let sd: Vec<SampleDataRecord> = read(&f.root, "sample_data");
    let victim = sd.iter().find(|r| r.fileformat == "png").unwrap();
    std::fs::remove_file(f.root.join(&victim.filename)).unwrap();
    let report = validate(&f.root).unwrap();
    assert_eq!(report.violations.len(), 1, "{:?}", report.violations);
    assert_eq!(report.violations[0].kind, ViolationKind::MissingFile);
    assert_eq!(report.violations[0].token, victim.token);
}

#[test]
fn dangling_token_is_one_reference_violation() {
    let f = fixture();
    let mut sd: Vec<SampleDataRecord> = read(&f.root, "sample_data");
    sd[4].ego_pose_token = "0123456789abcdef0123456789abcdef".into();
    write(&f.root, "sample_data", &sd);
    let report = validate(&f.root).unwrap();
    assert_eq!(report.violations.len(), 1, "{:?}", report.violations);
    assert_eq!(report.violations[0].kind, ViolationKind::DanglingReference);
    assert_eq!(report.violations[0].token, sd[4].token);
}

#[test]
fn broken_link_names_the_scene() {
    let f = fixture();
    let mut samples: Vec<SampleRecord> = read(&f.root, "sample");
    samples[1].next = samples[0].token.clone();
    write(&f.root, "sample", &samples);
    let report = validate(&f.root).unwrap();
    assert_eq!(report.violations.len(), 1, "{:?}", report.violations);
    assert_eq!(report.violations[0].kind, ViolationKind::BrokenSampleLink);
    assert_eq!(report.violations[0].token, samples[0].scene_token);
}

#[test]
fn duplicate_token_and_calibration_drift_are_reported() {
    let f = fixture();
    let mut sd: Vec<SampleDataRecord> = read(&f.root, "sample_data");
    let dup = sd[0].clone();
    sd.push(dup);
    write(&f.root, "sample_data", &sd);
    let mut calib: Vec<crossrig::package::CalibratedSensorRecord> =
        read(&f.root, "calibrated_sensor");
    calib[0].translation[2] += 0.01;
    write(&f.root, "calibrated_sensor", &calib);
    let report = validate(&f.root).unwrap();
    assert!(report.count(ViolationKind::DuplicateToken) >= 1);
    assert_eq!(report.count(ViolationKind::CalibrationMismatch), 1);
}

#[test]
fn missing_image_input_is_refused() {
    let f = fixture();
    let mut scene = f.scene.clone();
    let cam = f.world.target_rig.cameras[2].name.clone();
    scene.frames[1].images.remove(&cam);
    let out = f.root.with_file_name("never");
    let err = package(
        &[scene],
        &f.world.target_rig,
        &PackageOptions::default(),
        &out,
    )
    .unwrap_err();
    assert!(matches!(err, PackageError::MissingImage { frame: 1, .. }));
    assert!(!out.exists());
}

#[test]
fn duplicate_scene_names_are_refused() {
    let f = fixture();
    let out = f.root.with_file_name("dup");
    let err = package(
        &[f.scene.clone(), f.scene.clone()],
        &f.world.target_rig,
        &PackageOptions::default(),
        &out,
    )
    .unwrap_err();
    assert!(matches!(err, PackageError::DuplicateScene(_)));
}

#[test]
fn no_scenes_gives_empty_valid_dataset() {
    let f = fixture();
    let out = f.root.with_file_name("empty");
    let manifest = package(&[], &f.world.target_rig, &PackageOptions::default(), &out).unwrap();
    assert!(manifest.samples.is_empty());
    assert!(validate(&out).unwrap().is_ok());
}
