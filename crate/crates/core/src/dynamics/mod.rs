//! Time evolution of the vorticity `∂_t ω + u·∇ω = 0` on the torus.

mod evolve;
mod rhs;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::SpectralError;

pub use evolve::{evolve, evolve_with, relative_drift, Evolution, EvolutionLog, OrbitSample};
pub use rhs::{cfl_dt, rhs, step_rk4, EulerRhs, DEFAULT_DT_FLOOR};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("non-finite coefficient after step ending at t = {time}")]
    BlowupDetected { time: f64 },
    #[error("relative enstrophy drift {drift:e} exceeds {threshold:e} at t = {time}")]
    DriftExceeded { time: f64, drift: f64, threshold: f64 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DtPolicy {
    Fixed(f64),
    Cfl {
        sigma: f64,
        #[serde(default = "default_dt_floor")]
        dt_floor: f64,
    },
}

fn default_dt_floor() -> f64 {
    DEFAULT_DT_FLOOR
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub resolution: usize,
    pub dt: DtPolicy,
    pub dealias: bool,
    /// Sampling period `T`.
    pub t_sample: f64,
    pub t_end: f64,
    /// Relative enstrophy drift that aborts the run.
    pub drift_abort: f64,
    /// Index `s` of the monitored velocity `H^s` norm; `None` disables it.
    pub sobolev_index: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            resolution: 128,
            dt: DtPolicy::Fixed(1e-3),
            dealias: true,
            t_sample: 1.0,
            t_end: 10.0,
            drift_abort: 1e-3,
            sobolev_index: Some(3.0),
        }
    }
}

impl SolverConfig {
    /// Checks every field constraint, reporting the first violation.
    pub fn validate(&self) -> Result<(), DynamicsError> {
        let bad = |msg: String| Err(DynamicsError::InvalidConfig(msg));
        if self.resolution < 32 || !self.resolution.is_power_of_two() {
            return bad(format!("resolution must be a power of two >= 32, got {}", self.resolution));
        }
        match self.dt {
            DtPolicy::Fixed(dt) if !(dt > 0.0 && dt.is_finite()) => {
                return bad(format!("fixed dt must be positive and finite, got {dt}"))
            }
            DtPolicy::Cfl { sigma, .. } if !(sigma > 0.0 && sigma <= 1.0) => {
                return bad(format!("CFL safety factor must lie in (0, 1], got {sigma}"))
            }
            DtPolicy::Cfl { dt_floor, .. } if !(dt_floor > 0.0 && dt_floor.is_finite()) => {
                return bad(format!("CFL dt floor must be positive, got {dt_floor}"))
            }
            _ => {}
        }
        if !(self.t_sample > 0.0 && self.t_sample.is_finite()) {
            return bad(format!("sample period T must be positive, got {}", self.t_sample));
        }
        if !(self.t_end >= self.t_sample && self.t_end.is_finite()) {
            return bad(format!("t_end {} must be at least the sample period {}", self.t_end, self.t_sample));
        }
        if self.drift_abort.is_nan() || self.drift_abort <= 0.0 {
            return bad(format!("drift abort threshold must be positive, got {}", self.drift_abort));
        }
        if let Some(s) = self.sobolev_index {
            if !(s >= 0.0 && s.is_finite()) {
                return bad(format!("Sobolev index must be nonnegative, got {s}"));
            }
        }
        Ok(())
    }

    /// Samples at `t = mT` for `m = 0..=⌊t_end / T⌋`.
    pub fn sample_count(&self) -> usize {
        let ratio = self.t_end / self.t_sample;
        (ratio * (1.0 + 1e-12)).floor() as usize + 1
    }
}
