use serde::{Deserialize, Serialize};

use super::RecurrenceError;

/// Smallest `K >= 1` with `2 C / K² < ε / 2`.
pub fn select_mode_cutoff(enstrophy_bound: f64, epsilon: f64) -> usize {
    assert!(enstrophy_bound > 0.0 && enstrophy_bound.is_finite(), "enstrophy bound must be positive");
    assert!(epsilon > 0.0 && epsilon.is_finite(), "tail budget must be positive");
    let satisfies = |k: usize| 2.0 * enstrophy_bound / (k as f64 * k as f64) < epsilon / 2.0;
    let mut k = ((4.0 * enstrophy_bound / epsilon).sqrt().floor() as usize + 1).max(1);
    while !satisfies(k) {
        k += 1;
    }
    while k > 1 && satisfies(k - 1) {
        k -= 1;
    }
    k
}

/// `⌈M / cells⌉`: some cell of a partition of `M` samples into `cells` holds at least this many.
pub fn pigeonhole_floor(samples: usize, cells: usize) -> usize {
    assert!(samples >= 1 && cells >= 1, "pigeonhole needs at least one sample and one cell");
    samples.div_ceil(cells)
}

/// Parameters of the δ-cover of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverConfig {
    /// Radius `δ` of the recurrence neighbourhood, in L² velocity units.
    pub delta: f64,
    /// Tail budget `ε` used to choose the cutoff.
    pub epsilon: f64,
    /// Enstrophy bound `C` of the invariant set; every analyzed snapshot must satisfy `G <= C`.
    pub enstrophy_bound: f64,
    /// Mode cutoff `K = select_mode_cutoff(C, ε)`.
    pub cutoff: usize,
}

impl CoverConfig {
    /// `ε` defaults to `δ² / 2`.
    pub fn new(delta: f64, epsilon: Option<f64>, enstrophy_bound: f64) -> Result<Self, RecurrenceError> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(RecurrenceError::InvalidCover(format!("delta must be positive, got {delta}")));
        }
        let epsilon = epsilon.unwrap_or(0.5 * delta * delta);
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(RecurrenceError::InvalidCover(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(enstrophy_bound > 0.0 && enstrophy_bound.is_finite()) {
            return Err(RecurrenceError::InvalidCover(format!(
                "enstrophy bound C must be positive, got {enstrophy_bound}"
            )));
        }
        Ok(Self { delta, epsilon, enstrophy_bound, cutoff: select_mode_cutoff(enstrophy_bound, epsilon) })
    }

    /// Defaults from the initial state: `δ = 0.05 √E(0)`, `C = 2 G(0)`, `ε = δ² / 2`.
    pub fn from_initial(energy0: f64, enstrophy0: f64) -> Result<Self, RecurrenceError> {
        Self::new(0.05 * energy0.sqrt(), None, 2.0 * enstrophy0)
    }

    /// Ball radius of the net, `δ / 2`.
    pub fn radius(&self) -> f64 {
        0.5 * self.delta
    }

    /// `C / K²`, the per-snapshot tail energy bound.
    pub fn tail_bound(&self) -> f64 {
        self.enstrophy_bound / (self.cutoff as f64 * self.cutoff as f64)
    }

    /// Worst-case L² distance of two members of one cell: `δ` on the low modes plus
    /// `2 √C / K` on the tail.
    pub fn analytic_pair_bound(&self) -> f64 {
        let tail = 2.0 * self.enstrophy_bound.sqrt() / self.cutoff as f64;
        (self.delta * self.delta + tail * tail).sqrt()
    }
}
