use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{EvolutionLog, OrbitSample};
use crate::format;
use crate::spectral::SpectralVorticity;

use super::HarnessError;

pub const RUN_CONFIG: &str = "config.json";
pub const SNAPSHOT_DIR: &str = "snapshots";
pub const INDEX_FILE: &str = "snapshots.json";
pub const EVOLUTION_CSV: &str = "evolution.csv";
pub const REPORT_JSON: &str = "recurrence.json";
pub const REPORT_CSV: &str = "recurrence.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotIndexEntry {
    pub m: usize,
    pub t: f64,
    /// Path of the field file relative to the run directory.
    pub file: String,
    pub energy: f64,
    pub enstrophy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotIndex {
    #[serde(rename = "T")]
    pub t_sample: f64,
    pub samples: Vec<SnapshotIndexEntry>,
}

pub(crate) fn snapshot_file_name(m: usize) -> String {
    format!("{SNAPSHOT_DIR}/m{m:06}.json")
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

pub(crate) fn read_text(path: &Path) -> Result<String, HarnessError> {
    if !path.exists() {
        return Err(HarnessError::MissingArtifacts(path.to_path_buf()));
    }
    std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

pub(crate) fn write_snapshot(run_dir: &Path, sample: &OrbitSample) -> Result<SnapshotIndexEntry, HarnessError> {
    let file = snapshot_file_name(sample.m);
    write_text(&run_dir.join(&file), &sample.vorticity.to_json())?;
    Ok(SnapshotIndexEntry { m: sample.m, t: sample.t, file, energy: sample.energy, enstrophy: sample.enstrophy })
}

pub(crate) fn write_index(run_dir: &Path, index: &SnapshotIndex) -> Result<(), HarnessError> {
    let text = serde_json::to_string_pretty(index).expect("index serializes") + "\n";
    write_text(&run_dir.join(INDEX_FILE), &text)
}

pub fn read_index(run_dir: &Path) -> Result<SnapshotIndex, HarnessError> {
    let path = run_dir.join(INDEX_FILE);
    let text = read_text(&path)?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Parse { path, message: e.to_string() })
}

/// Loads every field listed in the index, in index order.
pub fn read_snapshot_fields(run_dir: &Path, index: &SnapshotIndex) -> Result<Vec<SpectralVorticity>, HarnessError> {
    index
        .samples
        .iter()
        .map(|entry| {
            let path = run_dir.join(&entry.file);
            let text = read_text(&path)?;
            SpectralVorticity::from_json(&text).map_err(|e| HarnessError::Parse { path, message: e.to_string() })
        })
        .collect()
}

pub(crate) fn evolution_csv(log: &EvolutionLog) -> String {
    let mut out = String::from("time,energy,enstrophy,sobolev_s\n");
    for r in &log.records {
        let sobolev = r.sobolev_s_norm.map(format::float).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            format::float(r.time),
            format::float(r.energy),
            format::float(r.enstrophy),
            sobolev
        ));
    }
    out
}

/// `(time, energy, enstrophy)` rows of an evolution CSV.
pub(crate) fn parse_evolution_csv(path: &Path, text: &str) -> Result<Vec<(f64, f64, f64)>, HarnessError> {
    let parse_err = |line: usize, what: &str| HarnessError::Parse {
        path: path.to_path_buf(),
        message: format!("line {line}: {what}"),
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.starts_with("time,energy,enstrophy") => {}
        _ => return Err(parse_err(1, "missing header")),
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() < 3 {
                return Err(parse_err(i + 1, "expected at least 3 columns"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| parse_err(i + 1, &format!("bad number {s:?}")));
            Ok((num(fields[0])?, num(fields[1])?, num(fields[2])?))
        })
        .collect()
}

pub(crate) fn ensure_dir(path: &Path) -> Result<PathBuf, HarnessError> {
    std::fs::create_dir_all(path)
        .map_err(|e| HarnessError::Config(format!("output directory {} is not writable: {e}", path.display())))?;
    Ok(path.to_path_buf())
}
