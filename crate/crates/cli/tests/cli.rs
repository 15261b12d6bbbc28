use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use crossrig::eval::predictions_to_jsonl;
use crossrig::package::{ground_truth_as_predictions, load_ground_truth};
use serde_json::Value;
use tempfile::TempDir;

fn crossrig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crossrig"))
        .args(args)
        .env_remove("CROSSRIG_THREADS")
        .output()
        .expect("spawn crossrig")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn ok(args: &[&str]) -> Output {
    let out = crossrig(args);
    assert_eq!(
        code(&out),
        0,
        "crossrig {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Small synthetic scene plus its config.
fn synth(dir: &Path) -> PathBuf {
    let out = dir.join("scene");
    ok(&[
        "synth",
        "--out",
        out.to_str().unwrap(),
        "--frames",
        "4",
        "--width",
        "96",
        "--height",
        "54",
    ]);
    out.join("config.json")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn files_under(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_path_buf();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn eval_map(config: &Path, predictions: &Path) -> f64 {
    ok(&[
        "eval",
        "--config",
        s(config),
        "--predictions",
        s(predictions),
    ]);
    let report_path = config.parent().unwrap().join("out/eval_report.json");
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(report_path).unwrap()).unwrap();
    report["map"].as_f64().unwrap()
}

#[test]
fn synth_run_validate_eval() {
    let tmp = TempDir::new().unwrap();
    let config = synth(tmp.path());
    ok(&["run", "--config", s(&config)]);
    ok(&["validate", "--config", s(&config)]);

    let dataset = config.parent().unwrap().join("out/dataset");
    assert!(dataset.join("v1.0-crossrig/sample.json").is_file());
    let gt = load_ground_truth(&dataset).unwrap();
    assert_eq!(gt.len(), 4);

    let perfect = ground_truth_as_predictions(&gt);
    let jsonl = predictions_to_jsonl(
        perfect
            .iter()
            .flat_map(|(id, ps)| ps.iter().map(move |p| (id.as_str(), p))),
    );
    let perfect_path = tmp.path().join("perfect.jsonl");
    std::fs::write(&perfect_path, jsonl).unwrap();
    assert_eq!(eval_map(&config, &perfect_path), 100.0);

    let empty_path = tmp.path().join("empty.jsonl");
    std::fs::write(&empty_path, "").unwrap();
    assert_eq!(eval_map(&config, &empty_path), 0.0);

    let text = std::fs::read_to_string(config.parent().unwrap().join("out/eval_report.txt"));
    assert!(text.unwrap().contains("mAP"));
}

#[test]
fn outputs_identical_across_threads_and_reruns() {
    let tmp = TempDir::new().unwrap();
    let config = synth(tmp.path());
    let runs = [("1", "out_a"), ("3", "out_b"), ("1", "out_c")];
    for (threads, out) in runs {
        let out = tmp.path().join(out);
        ok(&[
            "--threads",
            threads,
            "run",
            "--config",
            s(&config),
            "--paths.output",
            s(&out),
        ]);
    }
    let a = files_under(&tmp.path().join("out_a"));
    assert!(a.keys().any(|p| p.extension().is_some_and(|e| e == "png")));
    for other in ["out_b", "out_c"] {
        let b = files_under(&tmp.path().join(other));
        assert_eq!(a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>());
        for (path, bytes) in &a {
            assert!(bytes == &b[path], "{} differs in {other}", path.display());
        }
    }
}

#[test]
fn seed_changes_tokens() {
    let tmp = TempDir::new().unwrap();
    let config = synth(tmp.path());
    let tokens = |seed: &str, out: &str| {
        let out = tmp.path().join(out);
        ok(&[
            "run",
            "--config",
            s(&config),
            "--seed",
            seed,
            "--paths.output",
            s(&out),
        ]);
        let text = std::fs::read_to_string(out.join("dataset/v1.0-crossrig/scene.json")).unwrap();
        let scenes: Value = serde_json::from_str(&text).unwrap();
        scenes[0]["token"].as_str().unwrap().to_string()
    };
    assert_ne!(tokens("1", "a"), tokens("2", "b"));
}

fn camera_rows(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn retarget_offset_lowers_cameras() {
    let tmp = TempDir::new().unwrap();
    let config = synth(tmp.path());
    let base = config.parent().unwrap();

    ok(&["retarget", "--config", s(&config)]);
    let lowered = camera_rows(&base.join("out/poses.jsonl"));
    ok(&[
        "retarget",
        "--config",
        s(&config),
        "--rig_offset.translation_xyz_m",
        "[0, 0, 0]",
        "--paths.output=identity",
    ]);
    let identity = camera_rows(&base.join("identity/poses.jsonl"));

    assert_eq!(lowered.len(), identity.len());
    assert!(!lowered.is_empty() && lowered.len().is_multiple_of(6));
    for (lo, id) in lowered.iter().zip(&identity) {
        assert_eq!(lo["camera"], id["camera"]);
        let z = |v: &Value| v["camera_translation_xyz_m"][2].as_f64().unwrap();
        assert!((z(id) - z(lo) - 0.33).abs() < 1e-12, "{lo} vs {id}");
        for i in 0..2 {
            let c = |v: &Value| v["camera_translation_xyz_m"][i].as_f64().unwrap();
            assert!((c(id) - c(lo)).abs() < 1e-12);
        }
    }
}

#[test]
fn render_reference_check_passes() {
    let tmp = TempDir::new().unwrap();
    let config = synth(tmp.path());
    let out = ok(&["render", "--config", s(&config), "--reference"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.matches("reference check").count(), 6);
}

#[test]
fn configuration_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let config = synth(tmp.path());
    let missing = tmp.path().join("nope.json");
    assert_eq!(code(&crossrig(&["retarget", "--config", s(&missing)])), 2);

    let bad_value = crossrig(&["retarget", "--config", s(&config), "--render.width", "64"]);
    assert_eq!(code(&bad_value), 2);

    let bad_type = crossrig(&["retarget", "--config", s(&config), "--render.near=abc"]);
    assert_eq!(code(&bad_type), 2);

    let unknown = crossrig(&["retarget", "--config", s(&config), "--render.colour", "1"]);
    assert_eq!(code(&unknown), 2);

    let no_value = crossrig(&["retarget", "--config", s(&config), "--render.near"]);
    assert_eq!(code(&no_value), 2);

    let gone = crossrig(&[
        "retarget",
        "--config",
        s(&config),
        "--paths.target_rig",
        "missing_rig.json",
    ]);
    assert_eq!(code(&gone), 2);

    assert_eq!(code(&crossrig(&["validate"])), 2);
    assert_eq!(code(&crossrig(&["frobnicate"])), 2);
}

#[test]
fn validate_reports_missing_image() {
    let tmp = TempDir::new().unwrap();
    let config = synth(tmp.path());
    ok(&["run", "--config", s(&config)]);
    let dataset = config.parent().unwrap().join("out/dataset");
    let cam_dir = dataset.join("samples/CAM_FRONT");
    let victim = std::fs::read_dir(&cam_dir)
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    std::fs::remove_file(&victim).unwrap();

    let out = crossrig(&["validate", "--dataset", s(&dataset)]);
    assert_eq!(code(&out), 1);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let violations = report["violations"].as_array().unwrap();
    assert_eq!(violations.len(), 1, "{violations:?}");
    assert_eq!(violations[0]["kind"], "missing_file");
}
