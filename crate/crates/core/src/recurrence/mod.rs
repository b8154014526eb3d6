//! Finite δ-covers of sampled orbits and certified near returns.
//!
//! Bounded enstrophy `∫ ω² <= C` forces `Σ_{|k|>K} |û|² <= C / K²`, so an orbit
//! confined to that set is, up to a small tail, a cloud in the finite-dimensional
//! low-mode space. A greedy net of radius `δ/2` over that cloud is finite, and
//! pigeonhole puts at least `⌈M / #cells⌉` samples in one cell. Pairs inside the
//! winning cell are then checked in the exact L² metric.

mod cover;
mod net;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format;
use crate::spectral::l2_distance;

pub use crate::spectral::tail_energy;
pub use cover::{pigeonhole_floor, select_mode_cutoff, CoverConfig};
pub use net::{build_net, NetCell, Snapshot};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecurrenceError {
    #[error("no snapshots to analyze")]
    EmptyOrbit,
    #[error("snapshot m = {m} has enstrophy {enstrophy} above the bound C = {bound}")]
    EnstrophyBoundViolated { m: usize, enstrophy: f64, bound: f64 },
    #[error("snapshot m = {m} uses mode cutoff {found}, expected {expected}")]
    CutoffMismatch { m: usize, expected: usize, found: usize },
    #[error("invalid cover: {0}")]
    InvalidCover(String),
}

/// A pair of samples whose exact L² distance is below `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedPair {
    pub m_i: usize,
    pub m_j: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub cover: CoverConfig,
    pub snapshot_count: usize,
    pub cells: Vec<NetCell>,
    /// Index into `cells` of the most occupied cell (lowest centre `m` on ties).
    pub best_cell: usize,
    /// Sample index of the centre `u*` of the best cell.
    pub center_m: usize,
    /// The return times `{m_j}`: members of the best cell.
    pub return_sequence: Vec<usize>,
    pub certified_pairs: Vec<CertifiedPair>,
    /// Same-cell pairs whose exact distance turned out to be `>= δ`.
    pub rejected_pairs: usize,
    pub pigeonhole_floor: usize,
    /// `√(δ² + (2√C / K)²)`, the a-priori distance bound inside one cell.
    pub analytic_pair_bound: f64,
    /// Whether the best cell contains the initial sample `m = 0`.
    pub contains_initial: bool,
}

impl RecurrenceReport {
    pub fn occupancy(&self) -> Vec<(usize, usize)> {
        self.cells.iter().enumerate().map(|(i, c)| (i, c.occupancy())).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// `m_i,m_j,distance` rows of the certified pairs.
    pub fn pairs_csv(&self) -> String {
        pairs_csv(&self.certified_pairs)
    }

    pub fn save_json(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }
}

pub(crate) fn pairs_csv(pairs: &[CertifiedPair]) -> String {
    let mut out = String::from("m_i,m_j,distance\n");
    for p in pairs {
        out.push_str(&format!("{},{},{}\n", p.m_i, p.m_j, format::float(p.distance)));
    }
    out
}

/// Builds the `δ/2` net, selects the most occupied cell and certifies its member pairs.
pub fn detect_returns(snapshots: &[Snapshot], cover: &CoverConfig) -> Result<RecurrenceReport, RecurrenceError> {
    if snapshots.is_empty() {
        return Err(RecurrenceError::EmptyOrbit);
    }
    for s in snapshots {
        if s.cutoff != cover.cutoff {
            return Err(RecurrenceError::CutoffMismatch { m: s.m, expected: cover.cutoff, found: s.cutoff });
        }
        if s.enstrophy.is_nan() || s.enstrophy > cover.enstrophy_bound {
            return Err(RecurrenceError::EnstrophyBoundViolated {
                m: s.m,
                enstrophy: s.enstrophy,
                bound: cover.enstrophy_bound,
            });
        }
    }
    let cells = build_net(snapshots, cover.radius())?;
    let mut best_cell = 0;
    for (i, c) in cells.iter().enumerate() {
        let best = &cells[best_cell];
        if c.occupancy() > best.occupancy() || (c.occupancy() == best.occupancy() && c.center_m < best.center_m) {
            best_cell = i;
        }
    }
    let best = &cells[best_cell];

    let pairs: Vec<(usize, usize)> = (0..best.members.len())
        .flat_map(|a| ((a + 1)..best.members.len()).map(move |b| (a, b)))
        .map(|(a, b)| (best.members[a], best.members[b]))
        .collect();
    let checked: Vec<CertifiedPair> = pairs
        .par_iter()
        .map(|&(i, j)| CertifiedPair {
            m_i: snapshots[i].m,
            m_j: snapshots[j].m,
            distance: l2_distance(&snapshots[i].field, &snapshots[j].field),
        })
        .collect();
    let total = checked.len();
    let mut certified_pairs: Vec<CertifiedPair> = checked.into_iter().filter(|p| p.distance < cover.delta).collect();
    certified_pairs.sort_by_key(|p| (p.m_i, p.m_j));

    Ok(RecurrenceReport {
        cover: *cover,
        snapshot_count: snapshots.len(),
        best_cell,
        center_m: best.center_m,
        return_sequence: best.member_ms.clone(),
        rejected_pairs: total - certified_pairs.len(),
        certified_pairs,
        pigeonhole_floor: pigeonhole_floor(snapshots.len(), cells.len()),
        analytic_pair_bound: cover.analytic_pair_bound(),
        contains_initial: best.member_ms.contains(&0),
        cells,
    })
}

/// Every pair `(m_i < m_j)` with exact L² distance below `delta`, sorted.
pub fn brute_force_returns(snapshots: &[Snapshot], delta: f64) -> Vec<CertifiedPair> {
    let n = snapshots.len();
    let mut pairs: Vec<CertifiedPair> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            ((i + 1)..n).filter_map(move |j| {
                let d = l2_distance(&snapshots[i].field, &snapshots[j].field);
                let (a, b) = (snapshots[i].m.min(snapshots[j].m), snapshots[i].m.max(snapshots[j].m));
                (d < delta).then_some(CertifiedPair { m_i: a, m_j: b, distance: d })
            })
        })
        .collect();
    pairs.sort_by_key(|p| (p.m_i, p.m_j));
    pairs
}
