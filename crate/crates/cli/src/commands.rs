use std::path::{Path, PathBuf};

use crossrig::eval::{evaluate, load_predictions, EvalConfig, EvalReport};
use crossrig::geometry::{
    load_rig, load_trajectory, retarget_trajectory, subsample_trajectory, RigConfig, RigOffset,
    Trajectory,
};
use crossrig::map::{load_map, Frame, MapLayer};
use crossrig::package::{
    eval_samples, frames_from_render_manifest, package, validate, DatasetManifest, PackageOptions,
    SceneInput, ValidationReport,
};
use crossrig::render::{
    render, render_reference, render_rig, RenderCamera, RenderManifest, RenderOptions,
};
use crossrig::scene::load_scene;
use crossrig::synth::{SynthOptions, SyntheticWorld};
use serde::Serialize;

use crate::config::PipelineConfig;
use crate::error::CliError;

/// Reference-mode tolerance on linear channel values.
const REFERENCE_TOLERANCE: f32 = 1e-3;
/// Width of the downsampled frame used by `--reference`.
const REFERENCE_WIDTH: u32 = 64;

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    write_text(
        path,
        &serde_json::to_string_pretty(value).expect("serializable"),
    )
}

fn offset(cfg: &PipelineConfig) -> Result<RigOffset<f64>, CliError> {
    Ok(RigOffset::new(cfg.rig_offset.to_pose()?))
}

fn trajectory(cfg: &PipelineConfig) -> Result<Trajectory, CliError> {
    let all = load_trajectory(cfg.require("trajectory", &cfg.paths.trajectory)?)?;
    if all.is_empty() {
        return Err(CliError::Config("trajectory is empty".into()));
    }
    Ok(match cfg.keyframe_hz {
        Some(hz) => subsample_trajectory(&all, hz),
        None => all,
    })
}

fn target_rig(cfg: &PipelineConfig) -> Result<RigConfig<f64>, CliError> {
    Ok(load_rig(cfg.require("target_rig", &cfg.paths.target_rig)?)?)
}

#[derive(Serialize)]
struct PoseRow {
    frame_index: usize,
    t: f64,
    camera: String,
    camera_rotation_wxyz: [f64; 4],
    camera_translation_xyz_m: [f64; 3],
    vehicle_rotation_wxyz: [f64; 4],
    vehicle_translation_xyz_m: [f64; 3],
}

pub fn retarget(cfg: &PipelineConfig) -> Result<PathBuf, CliError> {
    let rig = target_rig(cfg)?;
    if let Some(src) = &cfg.paths.source_rig {
        let source = load_rig(src)?;
        log::info!("source rig {} ({} cameras)", source.rig_name, source.len());
    }
    let views = retarget_trajectory(&trajectory(cfg)?, &offset(cfg)?, &rig);
    let mut text = String::new();
    for v in &views {
        let row = PoseRow {
            frame_index: v.frame_index,
            t: v.t,
            camera: v.camera.clone(),
            camera_rotation_wxyz: v.camera_pose.rotation_wxyz(),
            camera_translation_xyz_m: v.camera_pose.translation_xyz(),
            vehicle_rotation_wxyz: v.vehicle_pose.rotation_wxyz(),
            vehicle_translation_xyz_m: v.vehicle_pose.translation_xyz(),
        };
        text.push_str(&serde_json::to_string(&row).expect("serializable"));
        text.push('\n');
    }
    let path = cfg.poses_path();
    write_text(&path, &text)?;
    println!(
        "{} camera poses for rig {} -> {}",
        views.len(),
        rig.rig_name,
        path.display()
    );
    Ok(path)
}

fn render_options(cfg: &PipelineConfig) -> RenderOptions {
    RenderOptions {
        near: cfg.render.near,
        far: cfg.render.far,
        resolution: cfg.render.width.zip(cfg.render.height),
    }
}

pub fn render_cmd(cfg: &PipelineConfig, reference: bool) -> Result<RenderManifest, CliError> {
    let rig = target_rig(cfg)?;
    let scene = load_scene(
        cfg.require("background", &cfg.paths.background)?,
        cfg.paths.tracks.as_deref(),
        cfg.paths.objects_dir.as_deref(),
        cfg.render.sky_color,
    )?;
    let poses = trajectory(cfg)?;
    let offset = offset(cfg)?;
    let options = render_options(cfg);
    // Checked before the full render so a bad clip range fails fast.
    RenderCamera::new(
        crossrig::geometry::Pose::identity(),
        rig.cameras[0].intrinsics,
    )
    .with_clip(options.near, options.far)?;
    let dir = cfg.render_dir();
    let manifest = render_rig(&scene, &poses, &offset, &rig, &dir, &options)?;
    println!(
        "rendered {} images ({} frames x {} cameras) -> {}",
        manifest.rows.len(),
        poses.len(),
        rig.len(),
        dir.display()
    );
    if reference {
        let views = retarget_trajectory(&poses[..1], &offset, &rig);
        let mut worst = 0.0f32;
        for v in &views {
            let k = &v.intrinsics;
            let w = REFERENCE_WIDTH.min(k.width);
            let h = ((k.height as f64 * w as f64 / k.width as f64).round() as u32).max(1);
            let cam = RenderCamera::new(v.camera_pose, k.resized(w, h)?)
                .with_clip(options.near, options.far)?;
            let g = scene.flatten_at(v.t);
            let diff =
                render(&g, &cam, &scene.sky).max_abs_diff(&render_reference(&g, &cam, &scene.sky));
            println!(
                "reference check {} {w}x{h}: max |fast - reference| = {diff:.3e}",
                v.camera
            );
            worst = worst.max(diff);
        }
        if worst > REFERENCE_TOLERANCE {
            return Err(CliError::Contract(format!(
                "fast renderer deviates from reference by {worst:.3e} (> {REFERENCE_TOLERANCE:e})"
            )));
        }
    }
    Ok(manifest)
}

fn world_map(cfg: &PipelineConfig) -> Result<Option<MapLayer<f64>>, CliError> {
    let Some(path) = &cfg.paths.map else {
        return Ok(None);
    };
    let layer = load_map(path)?.to_layer()?;
    if layer.frame != Frame::World {
        return Err(CliError::Config(format!(
            "{}: map must be in the world frame",
            path.display()
        )));
    }
    Ok(Some(layer))
}

pub fn package_cmd(cfg: &PipelineConfig) -> Result<DatasetManifest, CliError> {
    let rig = target_rig(cfg)?;
    let render_dir = cfg.render_dir();
    let manifest = RenderManifest::load(&render_dir)?;
    let frames = frames_from_render_manifest(&manifest, &render_dir, &rig)?;
    let scene = SceneInput {
        name: cfg.scene_name.clone(),
        frames,
        world_map: world_map(cfg)?,
    };
    let options = PackageOptions {
        name: cfg.dataset_name.clone(),
        seed: cfg.seed,
        bev_range: cfg.bev_range,
        num_points: cfg.num_points,
        masks_dir: cfg.paths.masks_dir.clone(),
        ..PackageOptions::default()
    };
    let out = cfg.dataset_dir();
    let summary = package(&[scene], &rig, &options, &out)?;
    write_json(&cfg.paths.output.join("package_manifest.json"), &summary)?;
    println!(
        "packaged {} samples of scene {} -> {} ({})",
        summary.samples.len(),
        cfg.scene_name,
        out.display(),
        summary.version
    );
    Ok(summary)
}

pub fn eval_cmd(cfg: &PipelineConfig, predictions: Option<&Path>) -> Result<EvalReport, CliError> {
    let path = match predictions {
        Some(p) => p,
        None => cfg.require("predictions", &cfg.paths.predictions)?,
    };
    if !path.is_file() {
        return Err(CliError::Config(format!(
            "predictions {} not found",
            path.display()
        )));
    }
    let preds = load_predictions(path)?;
    let dataset = cfg.dataset_dir();
    let samples = eval_samples(&dataset, preds)?;
    let config = EvalConfig {
        thresholds: cfg.thresholds.clone(),
        mode: cfg.ap_mode,
        pooling: cfg.pooling,
    };
    let report = evaluate(&samples, &config)?;
    let table = report.to_table();
    write_json(&cfg.paths.output.join("eval_report.json"), &report)?;
    write_text(&cfg.paths.output.join("eval_report.txt"), &table)?;
    print!("{table}");
    Ok(report)
}

pub fn validate_cmd(dataset: &Path) -> Result<ValidationReport, CliError> {
    if !dataset.is_dir() {
        return Err(CliError::Config(format!(
            "dataset {} is not a directory",
            dataset.display()
        )));
    }
    let report = validate(dataset)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("serializable")
    );
    if report.is_ok() {
        Ok(report)
    } else {
        Err(CliError::Violations(report.violations))
    }
}

/// Runs retarget, render, package and validate in order.
pub fn run_all(cfg: &PipelineConfig) -> Result<(), CliError> {
    retarget(cfg)?;
    render_cmd(cfg, false)?;
    package_cmd(cfg)?;
    validate_cmd(&cfg.dataset_dir())?;
    Ok(())
}

/// Writes the synthetic demo inputs and a config pointing at them.
pub fn synth_cmd(dir: &Path, options: &SynthOptions) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let world = SyntheticWorld::generate(options)?;
    let inputs = world.write_inputs(dir)?;
    let rel = |p: &Path| p.strip_prefix(dir).unwrap_or(p).to_path_buf();
    let mut cfg = PipelineConfig::default();
    cfg.paths.background = Some(rel(&inputs.background));
    cfg.paths.tracks = Some(rel(&inputs.tracks));
    cfg.paths.objects_dir = Some(rel(&inputs.objects_dir));
    cfg.paths.source_rig = Some(rel(&inputs.source_rig));
    cfg.paths.target_rig = Some(rel(&inputs.target_rig));
    cfg.paths.trajectory = Some(rel(&inputs.trajectory));
    cfg.paths.map = Some(rel(&inputs.map));
    cfg.rig_offset = (&world.offset.transform).into();
    cfg.keyframe_hz = Some(options.keyframe_hz);
    cfg.scene_name = world.scene.meta.scene_id.clone();
    let path = dir.join("config.json");
    write_json(&path, &cfg)?;
    println!("synthetic inputs -> {}", path.display());
    Ok(path)
}
