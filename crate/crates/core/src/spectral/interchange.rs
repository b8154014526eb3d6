//! JSON interchange for vorticity fields:
//! `{ "resolution": N, "convention": "exp-ik-x-2pi", "modes": [[k1, k2, re, im], ...] }`.
//!
//! One row per stored representative whose coefficient has any nonzero bit
//! (so `-0.0` survives). Floats are written as shortest round-trip decimals.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{MeanPolicy, SpectralVorticity};
use super::modes::WaveVector;
use super::SpectralError;

pub const CONVENTION: &str = "exp-ik-x-2pi";

#[derive(Debug, Serialize, Deserialize)]
struct FieldFile {
    resolution: usize,
    convention: String,
    modes: Vec<(i32, i32, f64, f64)>,
}

fn is_bitwise_zero(c: Complex64) -> bool {
    c.re.to_bits() == 0 && c.im.to_bits() == 0
}

impl SpectralVorticity {
    pub fn to_json(&self) -> String {
        let file = FieldFile {
            resolution: self.resolution(),
            convention: CONVENTION.to_string(),
            modes: self.modes().filter(|(_, c)| !is_bitwise_zero(*c)).map(|(k, c)| (k.k1, k.k2, c.re, c.im)).collect(),
        };
        serde_json::to_string(&file).expect("finite coefficients serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, SpectralError> {
        let file: FieldFile = serde_json::from_str(text).map_err(|e| SpectralError::Interchange(e.to_string()))?;
        if file.convention != CONVENTION {
            return Err(SpectralError::Interchange(format!("unsupported convention {:?}", file.convention)));
        }
        SpectralVorticity::from_entries(
            file.modes.into_iter().map(|(k1, k2, re, im)| (WaveVector::new(k1, k2), Complex64::new(re, im))),
            file.resolution,
            MeanPolicy::Strict,
        )
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }

    pub fn load(path: &Path) -> Result<Self, SpectralError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SpectralError::Interchange(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}
