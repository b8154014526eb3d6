//! Spectral integrals over the torus. With `f = Σ f̂(k) e^{ik·x}` on `[0, 2π)²`,
//! Parseval reads `∫ |f|² dx = 4π² Σ_k |f̂(k)|²`. Half-plane storage counts
//! every stored mode twice.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{SpectralVelocity, SpectralVorticity};
use super::modes::WaveVector;

pub(crate) const PARSEVAL: f64 = 4.0 * PI * PI;

/// Invariant values of one state at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantRecord {
    pub time: f64,
    pub energy: f64,
    pub enstrophy: f64,
    pub sobolev_s_norm: Option<f64>,
}

impl InvariantRecord {
    pub fn of(time: f64, w: &SpectralVorticity, sobolev_index: Option<f64>) -> Self {
        let u = w.to_velocity();
        Self {
            time,
            energy: energy(&u),
            enstrophy: enstrophy(w),
            sobolev_s_norm: sobolev_index.map(|s| velocity_sobolev_norm(&u, s)),
        }
    }
}

fn pair_norm_sqr(a: Complex64, b: Complex64) -> f64 {
    a.norm_sqr() + b.norm_sqr()
}

/// Kinetic energy `E = ∫ |u|² dx`.
pub fn energy(u: &SpectralVelocity) -> f64 {
    let (u1, u2) = u.components();
    2.0 * PARSEVAL * u1.iter().zip(u2).map(|(a, b)| pair_norm_sqr(*a, *b)).sum::<f64>()
}

/// Enstrophy `G = ∫ ω² dx`.
pub fn enstrophy(w: &SpectralVorticity) -> f64 {
    2.0 * PARSEVAL * w.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>()
}

/// `∫ |∇u|² dx = 4π² Σ |k|² |û(k)|²`; equals the enstrophy of `curl u`.
pub fn gradient_energy(u: &SpectralVelocity) -> f64 {
    2.0 * PARSEVAL * u.modes().map(|(k, a, b)| k.norm_sq() as f64 * pair_norm_sqr(a, b)).sum::<f64>()
}

/// `‖a - b‖_{L²}`. Fields of different resolution are compared with missing modes as zero.
pub fn l2_distance(a: &SpectralVelocity, b: &SpectralVelocity) -> f64 {
    let sum = if a.resolution() == b.resolution() {
        let (a1, a2) = a.components();
        let (b1, b2) = b.components();
        a1.iter()
            .zip(a2)
            .zip(b1.iter().zip(b2))
            .map(|((x1, x2), (y1, y2))| pair_norm_sqr(x1 - y1, x2 - y2))
            .sum::<f64>()
    } else {
        let (big, small) = if a.resolution() > b.resolution() { (a, b) } else { (b, a) };
        big.modes()
            .map(|(k, x1, x2)| {
                let (y1, y2) = small.coeff(k);
                pair_norm_sqr(x1 - y1, x2 - y2)
            })
            .sum::<f64>()
    };
    (2.0 * PARSEVAL * sum).sqrt()
}

/// `(4π² Σ (1 + |k|²)^s |û(k)|²)^{1/2}` of the velocity induced by `w`.
pub fn sobolev_norm(w: &SpectralVorticity, s: f64) -> f64 {
    velocity_sobolev_norm(&w.to_velocity(), s)
}

pub(crate) fn velocity_sobolev_norm(u: &SpectralVelocity, s: f64) -> f64 {
    assert!(s >= 0.0, "negative Sobolev index {s}");
    let sum = u.modes().map(|(k, a, b)| (1.0 + k.norm_sq() as f64).powf(s) * pair_norm_sqr(a, b)).sum::<f64>();
    (2.0 * PARSEVAL * sum).sqrt()
}

fn within_cutoff(k: WaveVector, cutoff: usize) -> bool {
    k.norm_sq() <= (cutoff as i64) * (cutoff as i64)
}

/// Coordinates of the modes `0 < |k| <= cutoff`.
///
/// One representative per `±k` pair in lexicographic `(k1, k2)` order; each
/// contributes `[re û1, im û1, re û2, im û2]` scaled by `√2`, so that
/// `4π² ‖v‖²` is the low-mode part of `∫ |u|² dx`.
pub fn low_mode_projection(u: &SpectralVelocity, cutoff: usize) -> Vec<f64> {
    assert!(cutoff >= 1, "mode cutoff must be at least 1");
    let s = std::f64::consts::SQRT_2;
    u.modes()
        .filter(|(k, _, _)| within_cutoff(*k, cutoff))
        .flat_map(|(_, a, b)| [s * a.re, s * a.im, s * b.re, s * b.im])
        .collect()
}

/// Energy in the modes `|k| <= cutoff`.
pub fn low_mode_energy(u: &SpectralVelocity, cutoff: usize) -> f64 {
    2.0 * PARSEVAL
        * u.modes().filter(|(k, _, _)| within_cutoff(*k, cutoff)).map(|(_, a, b)| pair_norm_sqr(a, b)).sum::<f64>()
}

/// Energy in the modes `|k| > cutoff`; bounded by `cutoff⁻² ∫ |∇u|²`.
pub fn tail_energy(u: &SpectralVelocity, cutoff: usize) -> f64 {
    assert!(cutoff >= 1, "mode cutoff must be at least 1");
    2.0 * PARSEVAL
        * u.modes().filter(|(k, _, _)| !within_cutoff(*k, cutoff)).map(|(_, a, b)| pair_norm_sqr(a, b)).sum::<f64>()
}
