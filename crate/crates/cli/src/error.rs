use std::path::{Path, PathBuf};

use crossrig::eval::EvalError;
use crossrig::geometry::GeometryError;
use crossrig::map::MapError;
use crossrig::package::{PackageError, Violation};
use crossrig::render::RenderError;
use crossrig::scene::SceneError;
use crossrig::synth::SynthError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// A dataset or prediction set that breaks the contract of the command.
    #[error("{0}")]
    Contract(String),
    #[error("{} violation(s)", .0.len())]
    Violations(Vec<Violation>),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Contract(_) | CliError::Violations(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::Io { path, source } => CliError::Io { path, source },
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<SceneError> for CliError {
    fn from(e: SceneError) -> Self {
        match e {
            SceneError::Io { path, source } => CliError::Io { path, source },
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<MapError> for CliError {
    fn from(e: MapError) -> Self {
        match e {
            MapError::Io { path, source } => CliError::Io { path, source },
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<RenderError> for CliError {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::Io { path, source } => CliError::Io { path, source },
            RenderError::Geometry(g) => g.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Io { path, source } => CliError::Io { path, source },
            EvalError::Map(m) => m.into(),
            EvalError::InvalidThresholds => CliError::Config(e.to_string()),
            other => CliError::Contract(other.to_string()),
        }
    }
}

impl From<PackageError> for CliError {
    fn from(e: PackageError) -> Self {
        match e {
            PackageError::Io { path, source } => CliError::Io { path, source },
            PackageError::Inconsistent(v) => CliError::Violations(v),
            PackageError::Geometry(g) => g.into(),
            PackageError::Map(m) => m.into(),
            PackageError::UnknownSample(_)
            | PackageError::MissingLabels(_)
            | PackageError::NotADataset(_) => CliError::Contract(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::Io { path, source } => CliError::Io { path, source },
            SynthError::Scene(s) => s.into(),
            SynthError::Geometry(g) => g.into(),
            SynthError::Map(m) => m.into(),
        }
    }
}
