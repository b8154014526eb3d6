//! Mean-zero real fields on the torus `[0, 2π)²` as truncated Fourier series.

mod field;
mod interchange;
mod modes;
mod norms;

use thiserror::Error;

pub(crate) use field::biot_savart;
pub use field::{MeanPolicy, SpectralVelocity, SpectralVorticity};
pub use interchange::CONVENTION;
pub use modes::{ModeLayout, WaveVector};
pub(crate) use norms::PARSEVAL;
pub use norms::{
    energy, enstrophy, gradient_energy, l2_distance, low_mode_energy, low_mode_projection, sobolev_norm, tail_energy,
    InvariantRecord,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("resolution {0} must be even and at least 4")]
    InvalidResolution(usize),
    #[error("mode ({k1}, {k2}) is not representable at resolution {resolution}")]
    ModeOutOfRange { k1: i32, k2: i32, resolution: usize },
    #[error("entries for ±({k1}, {k2}) are not complex conjugates")]
    NonHermitianInput { k1: i32, k2: i32 },
    #[error("mode ({k1}, {k2}) given twice with different values")]
    DuplicateMode { k1: i32, k2: i32 },
    #[error("nonzero (0, 0) coefficient: fields must have zero mean")]
    MeanNotZero,
    #[error("non-finite coefficient at mode ({k1}, {k2})")]
    NonFinite { k1: i32, k2: i32 },
    #[error("velocity mode ({k1}, {k2}) is not divergence free")]
    Divergent { k1: i32, k2: i32 },
    #[error("field interchange: {0}")]
    Interchange(String),
}

/// `ω ↦ u`, see [`SpectralVorticity::to_velocity`].
pub fn vorticity_to_velocity(w: &SpectralVorticity) -> SpectralVelocity {
    w.to_velocity()
}

/// Builds a vorticity field with Hermitian closure and strict mean handling.
pub fn make_vorticity(
    entries: impl IntoIterator<Item = (WaveVector, num_complex::Complex64)>,
    resolution: usize,
) -> Result<SpectralVorticity, SpectralError> {
    SpectralVorticity::from_entries(entries, resolution, MeanPolicy::Strict)
}
