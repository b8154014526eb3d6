//! Experiment plumbing: configuration, initial conditions, the
//! simulate → detect pipeline and its on-disk artifacts.

mod artifacts;
mod experiment;
mod ic;
mod verify;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{DynamicsError, SolverConfig};
use crate::recurrence::{CoverConfig, RecurrenceError};
use crate::spectral::SpectralError;

pub use artifacts::{
    read_index, read_snapshot_fields, SnapshotIndex, SnapshotIndexEntry, EVOLUTION_CSV, INDEX_FILE, REPORT_CSV,
    REPORT_JSON, RUN_CONFIG, SNAPSHOT_DIR,
};
pub use experiment::{detect, export_plot_data, run_experiment, simulate, snapshots_for_cover, PlotData, RunSummary};
pub use ic::{generate_ic, CosineMode, IcSpec};
pub use verify::{self_test, CheckResult};

pub const THREADS_ENV: &str = "EULER_RECUR_THREADS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("band [{kmin}, {kmax}] is empty or not representable at resolution {resolution}")]
    BandOutOfRange { kmin: u32, kmax: u32, resolution: usize },
    #[error("missing artifact {0}")]
    MissingArtifacts(PathBuf),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.to_path_buf(), source }
    }

    /// Process exit status: 2 configuration, 3 blowup, 4 drift abort, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::BandOutOfRange { .. } => 2,
            HarnessError::Dynamics(DynamicsError::InvalidConfig(_)) => 2,
            HarnessError::Recurrence(RecurrenceError::InvalidCover(_)) => 2,
            HarnessError::Dynamics(DynamicsError::BlowupDetected { .. }) => 3,
            HarnessError::Dynamics(DynamicsError::DriftExceeded { .. }) => 4,
            _ => 1,
        }
    }
}

/// Optional replacements for the cover defaults derived from the initial state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoverOverrides {
    pub delta: Option<f64>,
    pub epsilon: Option<f64>,
    #[serde(alias = "C")]
    pub enstrophy_bound: Option<f64>,
}

impl CoverOverrides {
    /// Defaults `δ = 0.05 √E(0)`, `C = 2 G(0)`, `ε = δ² / 2`, each replaced when set.
    pub fn resolve(&self, energy0: f64, enstrophy0: f64) -> Result<CoverConfig, RecurrenceError> {
        let delta = self.delta.unwrap_or(0.05 * energy0.sqrt());
        let bound = self.enstrophy_bound.unwrap_or(2.0 * enstrophy0);
        CoverConfig::new(delta, self.epsilon, bound)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let check = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => {
                Err(HarnessError::Config(format!("cover {name} must be positive, got {x}")))
            }
            _ => Ok(()),
        };
        check("delta", self.delta)?;
        check("epsilon", self.epsilon)?;
        check("enstrophy bound C", self.enstrophy_bound)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub ic_spec: IcSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub cover: CoverOverrides,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_formats")]
    pub export_formats: Vec<ExportFormat>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("euler-recur-out")
}

fn default_formats() -> Vec<ExportFormat> {
    vec![ExportFormat::Json, ExportFormat::Csv]
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            ic_spec: IcSpec::default(),
            solver: SolverConfig::default(),
            cover: CoverOverrides::default(),
            output_dir: default_output_dir(),
            export_formats: default_formats(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    /// Checks every constraint that can be checked without touching the filesystem.
    pub fn validate(&self) -> Result<(), HarnessError> {
        self.ic_spec.validate()?;
        self.solver.validate().map_err(|e| match e {
            DynamicsError::InvalidConfig(msg) => HarnessError::Config(msg),
            other => other.into(),
        })?;
        self.cover.validate()?;
        if self.export_formats.is_empty() {
            return Err(HarnessError::Config("export_formats must name at least one of json, csv".to_string()));
        }
        Ok(())
    }

    pub(crate) fn wants(&self, format: ExportFormat) -> bool {
        self.export_formats.contains(&format)
    }
}

/// Caps rayon's global pool at `EULER_RECUR_THREADS` when set. Returns the cap applied.
pub fn configure_threads_from_env() -> Result<Option<usize>, HarnessError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| HarnessError::Config(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // A pool that already exists keeps its size; only the first call can set it.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(Some(threads))
}
