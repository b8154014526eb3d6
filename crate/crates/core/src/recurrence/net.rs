use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::spectral::{energy, gradient_energy, low_mode_projection, tail_energy, SpectralVelocity};

use super::RecurrenceError;

/// One orbit sample as seen by the detector: its low-mode coordinates at a
/// fixed cutoff, tail information, and the full field for exact checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub m: usize,
    pub t: f64,
    pub cutoff: usize,
    pub projection: Vec<f64>,
    /// `4π² Σ_{|k|>K} |û(k)|²`.
    pub tail_energy: f64,
    /// `K⁻² ∫ |∇u|²`, which bounds `tail_energy`.
    pub tail_energy_bound: f64,
    pub energy: f64,
    /// `∫ |∇u|² = ∫ ω²`.
    pub enstrophy: f64,
    pub source_ref: Option<String>,
    pub field: Arc<SpectralVelocity>,
}

impl Snapshot {
    pub fn new(m: usize, t: f64, field: Arc<SpectralVelocity>, cutoff: usize) -> Self {
        let enstrophy = gradient_energy(&field);
        Self {
            m,
            t,
            cutoff,
            projection: low_mode_projection(&field, cutoff),
            tail_energy: tail_energy(&field, cutoff),
            tail_energy_bound: enstrophy / (cutoff as f64 * cutoff as f64),
            energy: energy(&field),
            enstrophy,
            source_ref: None,
            field,
        }
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source_ref = Some(source.into());
        self
    }

    /// L² distance between the low-mode parts, `2π ‖Δ projection‖`.
    pub fn low_mode_distance(&self, other: &Snapshot) -> f64 {
        let sum: f64 = self.projection.iter().zip(&other.projection).map(|(a, b)| (a - b) * (a - b)).sum();
        2.0 * PI * sum.sqrt()
    }
}

/// A ball `B_{δ/2}` of the net, centred at a snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetCell {
    /// Position of the centre in the analyzed snapshot slice.
    pub center_index: usize,
    pub center_m: usize,
    pub radius: f64,
    /// Positions in the snapshot slice, in increasing `m`.
    pub members: Vec<usize>,
    pub member_ms: Vec<usize>,
}

impl NetCell {
    pub fn occupancy(&self) -> usize {
        self.members.len()
    }
}

pub(crate) fn check_cutoffs(snapshots: &[Snapshot]) -> Result<(), RecurrenceError> {
    if let Some(first) = snapshots.first() {
        for s in snapshots {
            if s.cutoff != first.cutoff || s.projection.len() != first.projection.len() {
                return Err(RecurrenceError::CutoffMismatch { m: s.m, expected: first.cutoff, found: s.cutoff });
            }
        }
    }
    Ok(())
}

/// Greedy first-fit cover in the low-mode metric.
///
/// Snapshots are scanned in increasing `m` (ties keep slice order). Each joins the
/// earliest-opened cell whose centre lies within `radius`, or opens a new cell
/// centred on itself. The cells partition the snapshots.
pub fn build_net(snapshots: &[Snapshot], radius: f64) -> Result<Vec<NetCell>, RecurrenceError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(RecurrenceError::InvalidCover(format!("net radius must be positive, got {radius}")));
    }
    check_cutoffs(snapshots)?;
    let mut order: Vec<usize> = (0..snapshots.len()).collect();
    order.sort_by_key(|&i| snapshots[i].m);

    let mut cells: Vec<NetCell> = Vec::new();
    for i in order {
        let s = &snapshots[i];
        match cells.iter_mut().find(|c| snapshots[c.center_index].low_mode_distance(s) <= radius) {
            Some(cell) => {
                cell.members.push(i);
                cell.member_ms.push(s.m);
            }
            None => {
                cells.push(NetCell { center_index: i, center_m: s.m, radius, members: vec![i], member_ms: vec![s.m] })
            }
        }
    }
    Ok(cells)
}
