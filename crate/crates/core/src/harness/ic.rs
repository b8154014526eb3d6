use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::spectral::{enstrophy, make_vorticity, ModeLayout, SpectralVorticity, WaveVector};

use super::HarnessError;

/// One cosine mode `amplitude · cos(k·x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosineMode {
    pub k: [i32; 2],
    pub amplitude: f64,
}

impl CosineMode {
    fn entry(&self) -> (WaveVector, Complex64) {
        (WaveVector::new(self.k[0], self.k[1]), Complex64::new(0.5 * self.amplitude, 0.0))
    }
}

/// Named initial vorticity `ω̃`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IcSpec {
    SingleMode {
        k: [i32; 2],
        amplitude: f64,
    },
    TwoMode {
        modes: [CosineMode; 2],
    },
    /// Flat spectrum on `kmin <= |k| <= kmax` with uniform random phases, scaled to enstrophy `G₀`.
    RandomBand {
        kmin: u32,
        kmax: u32,
        enstrophy: f64,
        seed: Option<u64>,
    },
}

impl Default for IcSpec {
    fn default() -> Self {
        IcSpec::RandomBand { kmin: 1, kmax: 4, enstrophy: 50.0, seed: Some(0) }
    }
}

impl IcSpec {
    /// `cos x1 + cos x2`.
    pub fn two_mode_default() -> Self {
        IcSpec::TwoMode { modes: [CosineMode { k: [1, 0], amplitude: 1.0 }, CosineMode { k: [0, 1], amplitude: 1.0 }] }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            IcSpec::RandomBand { seed, .. } => *seed,
            _ => None,
        }
    }

    /// Replaces the seed of a stochastic generator; deterministic generators are unchanged.
    pub fn set_seed(&mut self, new_seed: u64) {
        if let IcSpec::RandomBand { seed, .. } = self {
            *seed = Some(new_seed);
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        match self {
            IcSpec::SingleMode { amplitude, .. } if !amplitude.is_finite() => {
                bad(format!("single_mode amplitude must be finite, got {amplitude}"))
            }
            IcSpec::TwoMode { modes } if modes.iter().any(|m| !m.amplitude.is_finite()) => {
                bad("two_mode amplitudes must be finite".to_string())
            }
            IcSpec::RandomBand { seed: None, .. } => bad("random_band initial condition requires a seed".to_string()),
            IcSpec::RandomBand { enstrophy, .. } if !(*enstrophy > 0.0 && enstrophy.is_finite()) => {
                bad(format!("random_band target enstrophy must be positive, got {enstrophy}"))
            }
            _ => Ok(()),
        }
    }
}

/// Builds `ω̃` at resolution `n`; deterministic in `(spec, n)`.
pub fn generate_ic(spec: &IcSpec, n: usize) -> Result<SpectralVorticity, HarnessError> {
    spec.validate()?;
    match spec {
        IcSpec::SingleMode { k, amplitude } => {
            let mode = CosineMode { k: *k, amplitude: *amplitude };
            Ok(make_vorticity([mode.entry()], n)?)
        }
        IcSpec::TwoMode { modes } => {
            let (a, b) = (modes[0].entry(), modes[1].entry());
            if a.0.canonical().0 == b.0.canonical().0 {
                return Err(HarnessError::Config(format!("two_mode modes coincide at ±{:?}", a.0)));
            }
            Ok(make_vorticity([a, b], n)?)
        }
        IcSpec::RandomBand { kmin, kmax, enstrophy: target, seed } => {
            let out_of_range = || HarnessError::BandOutOfRange { kmin: *kmin, kmax: *kmax, resolution: n };
            if *kmin < 1 || kmin > kmax || *kmax as usize > n / 2 {
                return Err(out_of_range());
            }
            let (lo, hi) = ((*kmin as i64).pow(2), (*kmax as i64).pow(2));
            let mut rng = ChaCha8Rng::seed_from_u64(seed.expect("validated"));
            let entries: Vec<(WaveVector, Complex64)> = ModeLayout::new(n)
                .iter()
                .filter(|k| (lo..=hi).contains(&k.norm_sq()))
                .map(|k| (k, Complex64::from_polar(1.0, 2.0 * PI * rng.gen::<f64>())))
                .collect();
            if entries.is_empty() {
                return Err(out_of_range());
            }
            let unit = make_vorticity(entries.iter().copied(), n)?;
            let scale = (target / enstrophy(&unit)).sqrt();
            Ok(make_vorticity(entries.into_iter().map(|(k, c)| (k, c * scale)), n)?)
        }
    }
}
