//! `crossrig`: retarget, render, package, evaluate and validate from one
//! JSON config. Any `--dotted.key value` flag overrides that config key.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crossrig::synth::SynthOptions;

use crate::config::PipelineConfig;
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "crossrig",
    version,
    about = "Retarget driving scenes to a new camera rig"
)]
struct Cli {
    /// Worker threads (default: CROSSRIG_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Token seed; same as `--seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute target camera poses along the trajectory.
    Retarget(Common),
    /// Render every target camera at every keyframe.
    Render {
        #[command(flatten)]
        common: Common,
        /// Also compare fast and reference renderers on a downsampled frame.
        #[arg(long)]
        reference: bool,
    },
    /// Package rendered images and map labels as a nuScenes-style dataset.
    Package(Common),
    /// Score vector-map predictions against a packaged dataset.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        predictions: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Check a packaged dataset; exit code 1 on any violation.
    Validate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Retarget, render, package and validate.
    Run(Common),
    /// Write a procedural demo scene and a config for it.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        frames: usize,
        #[arg(long, default_value_t = 320)]
        width: u32,
        #[arg(long, default_value_t = 180)]
        height: u32,
    },
}

/// Splits `--a.b value` / `--a.b=value` flags (keys containing a dot) out of
/// the argument list.
fn split_overrides(args: Vec<String>) -> Result<(Vec<String>, Vec<(String, String)>), CliError> {
    let mut rest = Vec::new();
    let mut overrides = Vec::new();
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let Some(flag) = arg.strip_prefix("--") else {
            rest.push(arg);
            continue;
        };
        let (key, inline) = match flag.split_once('=') {
            Some((k, v)) => (k.to_string(), Some(v.to_string())),
            None => (flag.to_string(), None),
        };
        if !key.contains('.') {
            rest.push(arg);
            continue;
        }
        let value = match inline {
            Some(v) => v,
            None => it
                .next()
                .ok_or_else(|| CliError::Config(format!("--{key} needs a value")))?,
        };
        overrides.push((key, value));
    }
    Ok((rest, overrides))
}

fn setup_threads(threads: Option<usize>) -> Result<(), CliError> {
    let n =
        match threads {
            Some(n) => Some(n),
            None => match std::env::var("CROSSRIG_THREADS") {
                Ok(v) => Some(v.trim().parse().map_err(|_| {
                    CliError::Config(format!("CROSSRIG_THREADS={v:?} is not a count"))
                })?),
                Err(_) => None,
            },
        };
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::Config("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn load(common: &Common, overrides: &[(String, String)]) -> Result<PipelineConfig, CliError> {
    let mut overrides = overrides.to_vec();
    if let Some(seed) = common.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    PipelineConfig::load(&common.config, &overrides)
}

fn run(cli: Cli, overrides: &[(String, String)]) -> Result<(), CliError> {
    setup_threads(cli.threads)?;
    match cli.command {
        Command::Retarget(c) => commands::retarget(&load(&c, overrides)?).map(drop),
        Command::Render { common, reference } => {
            commands::render_cmd(&load(&common, overrides)?, reference).map(drop)
        }
        Command::Package(c) => commands::package_cmd(&load(&c, overrides)?).map(drop),
        Command::Eval {
            common,
            predictions,
            dataset,
        } => {
            let mut cfg = load(&common, overrides)?;
            if dataset.is_some() {
                cfg.paths.dataset = dataset;
            }
            commands::eval_cmd(&cfg, predictions.as_deref()).map(drop)
        }
        Command::Validate { config, dataset } => {
            let dataset = match (dataset, config) {
                (Some(d), _) => d,
                (None, Some(c)) => PipelineConfig::load(&c, overrides)?.dataset_dir(),
                (None, None) => {
                    return Err(CliError::Config(
                        "validate needs --dataset or --config".into(),
                    ))
                }
            };
            commands::validate_cmd(&dataset).map(drop)
        }
        Command::Run(c) => commands::run_all(&load(&c, overrides)?),
        Command::Synth {
            out,
            frames,
            width,
            height,
        } => {
            let options = SynthOptions {
                frames,
                width,
                height,
                ..SynthOptions::default()
            };
            commands::synth_cmd(&out, &options).map(drop)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let result = split_overrides(std::env::args().collect()).and_then(|(args, overrides)| {
        let cli = Cli::try_parse_from(args).unwrap_or_else(|e| {
            // help and version exit 0, usage errors exit 2 like other configuration errors
            e.exit()
        });
        run(cli, &overrides)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let CliError::Violations(v) = &e {
                for violation in v {
                    eprintln!("violation: {violation}");
                }
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
