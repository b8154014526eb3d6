use serde::{Deserialize, Serialize};

use crate::spectral::{InvariantRecord, SpectralVorticity, PARSEVAL};

use super::rhs::EulerRhs;
use super::{DtPolicy, DynamicsError, SolverConfig};

/// The orbit at `t = mT`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSample {
    pub m: usize,
    pub t: f64,
    pub vorticity: SpectralVorticity,
    pub energy: f64,
    pub enstrophy: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvolutionLog {
    /// One record per sample time, plus the final time when it is not a sample time.
    pub records: Vec<InvariantRecord>,
    /// Largest relative drift from `t = 0` seen after any step.
    pub max_energy_drift: f64,
    pub max_enstrophy_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub final_state: SpectralVorticity,
    pub samples: Vec<OrbitSample>,
    pub log: EvolutionLog,
}

/// `|x - x0| / x0`, or `|x - x0|` when the reference vanishes.
pub fn relative_drift(x: f64, x0: f64) -> f64 {
    if x0 == 0.0 {
        (x - x0).abs()
    } else {
        ((x - x0) / x0).abs()
    }
}

/// Energy and enstrophy straight from vorticity coefficients.
fn quick_invariants(w: &SpectralVorticity) -> (f64, f64) {
    let (mut e, mut g) = (0.0, 0.0);
    for (k, c) in w.modes() {
        let a = c.norm_sqr();
        e += a / k.norm_sq() as f64;
        g += a;
    }
    (2.0 * PARSEVAL * e, 2.0 * PARSEVAL * g)
}

struct Runner {
    rhs: EulerRhs,
    policy: DtPolicy,
    energy0: f64,
    enstrophy0: f64,
    drift_abort: f64,
    max_energy_drift: f64,
    max_enstrophy_drift: f64,
}

impl Runner {
    fn step(&mut self, w: &SpectralVorticity, dt: f64, t_after: f64) -> Result<SpectralVorticity, DynamicsError> {
        let next = self.rhs.step_rk4(w, dt).map_err(|e| match e {
            DynamicsError::BlowupDetected { .. } => DynamicsError::BlowupDetected { time: t_after },
            other => other,
        })?;
        let (e, g) = quick_invariants(&next);
        let (de, dg) = (relative_drift(e, self.energy0), relative_drift(g, self.enstrophy0));
        if !(de.is_finite() && dg.is_finite()) {
            return Err(DynamicsError::BlowupDetected { time: t_after });
        }
        self.max_energy_drift = self.max_energy_drift.max(de);
        self.max_enstrophy_drift = self.max_enstrophy_drift.max(dg);
        if dg > self.drift_abort {
            return Err(DynamicsError::DriftExceeded { time: t_after, drift: dg, threshold: self.drift_abort });
        }
        Ok(next)
    }

    /// Integrates over `[t0, t0 + len]`, shortening the last step to land exactly on the end.
    fn advance(&mut self, mut w: SpectralVorticity, t0: f64, len: f64) -> Result<SpectralVorticity, DynamicsError> {
        match self.policy {
            DtPolicy::Fixed(dt) => {
                let n = ((len / dt) - 1e-9).ceil().max(1.0) as usize;
                for i in 0..n {
                    let h = if i + 1 == n { len - (n - 1) as f64 * dt } else { dt };
                    w = self.step(&w, h, t0 + (i + 1) as f64 * dt)?;
                }
            }
            DtPolicy::Cfl { sigma, dt_floor } => {
                let mut elapsed = 0.0;
                loop {
                    let remaining = len - elapsed;
                    let mut h = self.rhs.cfl_dt(&w, sigma, dt_floor);
                    let last = h >= remaining * (1.0 - 1e-12);
                    if last {
                        h = remaining;
                    }
                    w = self.step(&w, h, t0 + elapsed + h)?;
                    elapsed += h;
                    if last {
                        break;
                    }
                }
            }
        }
        Ok(w)
    }
}

/// Evolves `w0` to `cfg.t_end`, sampling exactly at every `t = mT`.
///
/// With dealiasing the initial field is first truncated to the retained box.
/// The step schedule inside each sampling interval depends only on the
/// interval's start state, so evolving to `2T` equals evolving to `T` twice.
pub fn evolve(w0: &SpectralVorticity, cfg: &SolverConfig) -> Result<Evolution, DynamicsError> {
    evolve_with(w0, cfg, |_| {})
}

/// [`evolve`], calling `on_sample` as each sample is taken.
pub fn evolve_with(
    w0: &SpectralVorticity,
    cfg: &SolverConfig,
    mut on_sample: impl FnMut(&OrbitSample),
) -> Result<Evolution, DynamicsError> {
    cfg.validate()?;
    if w0.resolution() != cfg.resolution {
        return Err(DynamicsError::InvalidConfig(format!(
            "initial field resolution {} differs from solver resolution {}",
            w0.resolution(),
            cfg.resolution
        )));
    }
    if !w0.is_finite() {
        return Err(DynamicsError::BlowupDetected { time: 0.0 });
    }
    let rhs = EulerRhs::new(cfg.resolution, cfg.dealias)?;
    let mut w = if cfg.dealias { w0.truncated(rhs.band() as u32) } else { w0.clone() };
    let (energy0, enstrophy0) = quick_invariants(&w);
    let mut runner = Runner {
        rhs,
        policy: cfg.dt,
        energy0,
        enstrophy0,
        drift_abort: cfg.drift_abort,
        max_energy_drift: 0.0,
        max_enstrophy_drift: 0.0,
    };

    let n_samples = cfg.sample_count();
    let mut samples = Vec::with_capacity(n_samples);
    let mut records = Vec::with_capacity(n_samples + 1);
    for m in 0..n_samples {
        if m > 0 {
            w = runner.advance(w, (m - 1) as f64 * cfg.t_sample, cfg.t_sample)?;
        }
        let t = m as f64 * cfg.t_sample;
        let record = InvariantRecord::of(t, &w, cfg.sobolev_index);
        let sample = OrbitSample { m, t, vorticity: w.clone(), energy: record.energy, enstrophy: record.enstrophy };
        on_sample(&sample);
        samples.push(sample);
        records.push(record);
    }
    let t_last = (n_samples - 1) as f64 * cfg.t_sample;
    let remaining = cfg.t_end - t_last;
    if remaining > 1e-12 * cfg.t_sample {
        w = runner.advance(w, t_last, remaining)?;
        records.push(InvariantRecord::of(cfg.t_end, &w, cfg.sobolev_index));
    }
    Ok(Evolution {
        final_state: w,
        samples,
        log: EvolutionLog {
            records,
            max_energy_drift: runner.max_energy_drift,
            max_enstrophy_drift: runner.max_enstrophy_drift,
        },
    })
}
