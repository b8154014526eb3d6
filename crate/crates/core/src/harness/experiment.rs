use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use crate::dynamics::{evolve_with, Evolution, OrbitSample};
use crate::format;
use crate::recurrence::{detect_returns, pairs_csv, CertifiedPair, CoverConfig, RecurrenceReport, Snapshot};

use super::artifacts::{
    ensure_dir, evolution_csv, parse_evolution_csv, read_index, read_snapshot_fields, read_text, write_index,
    write_snapshot, write_text, SnapshotIndex, EVOLUTION_CSV, REPORT_CSV, REPORT_JSON, RUN_CONFIG, SNAPSHOT_DIR,
};
use super::{generate_ic, CoverOverrides, ExperimentConfig, ExportFormat, HarnessError};

/// Generates the initial condition, evolves it, and writes the snapshot stream,
/// its index and the evolution CSV under `cfg.output_dir`.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Evolution, HarnessError> {
    cfg.validate()?;
    let run_dir = ensure_dir(&cfg.output_dir)?;
    ensure_dir(&run_dir.join(SNAPSHOT_DIR))?;
    write_text(&run_dir.join(RUN_CONFIG), &cfg.to_json())?;

    let w0 = generate_ic(&cfg.ic_spec, cfg.solver.resolution)?;
    let mut entries = Vec::new();
    let mut write_error = None;
    let evolution = evolve_with(&w0, &cfg.solver, |sample| {
        if write_error.is_none() {
            match write_snapshot(&run_dir, sample) {
                Ok(entry) => entries.push(entry),
                Err(e) => write_error = Some(e),
            }
        }
    })?;
    if let Some(e) = write_error {
        return Err(e);
    }
    write_index(&run_dir, &SnapshotIndex { t_sample: cfg.solver.t_sample, samples: entries })?;
    write_text(&run_dir.join(EVOLUTION_CSV), &evolution_csv(&evolution.log))?;
    Ok(evolution)
}

/// Detector view of orbit samples at the cover's cutoff.
pub fn snapshots_for_cover(samples: &[OrbitSample], cover: &CoverConfig) -> Vec<Snapshot> {
    samples
        .iter()
        .map(|s| {
            Snapshot::new(s.m, s.t, Arc::new(s.vorticity.to_velocity()), cover.cutoff)
                .with_source(super::artifacts::snapshot_file_name(s.m))
        })
        .collect()
}

fn analyze(samples: &[OrbitSample], overrides: &CoverOverrides) -> Result<RecurrenceReport, HarnessError> {
    let first = samples.iter().min_by_key(|s| s.m).ok_or(crate::recurrence::RecurrenceError::EmptyOrbit)?;
    let cover = overrides.resolve(first.energy, first.enstrophy)?;
    Ok(detect_returns(&snapshots_for_cover(samples, &cover), &cover)?)
}

fn write_report(run_dir: &Path, report: &RecurrenceReport, formats: &[ExportFormat]) -> Result<(), HarnessError> {
    if formats.contains(&ExportFormat::Json) {
        write_text(&run_dir.join(REPORT_JSON), &report.to_json())?;
    }
    if formats.contains(&ExportFormat::Csv) {
        write_text(&run_dir.join(REPORT_CSV), &report.pairs_csv())?;
    }
    Ok(())
}

/// Runs the detector over a finished simulation directory and writes the report next to it.
pub fn detect(
    run_dir: &Path,
    overrides: &CoverOverrides,
    formats: &[ExportFormat],
) -> Result<RecurrenceReport, HarnessError> {
    let index = read_index(run_dir)?;
    let fields = read_snapshot_fields(run_dir, &index)?;
    let samples: Vec<OrbitSample> = index
        .samples
        .iter()
        .zip(fields)
        .map(|(e, vorticity)| OrbitSample { m: e.m, t: e.t, vorticity, energy: e.energy, enstrophy: e.enstrophy })
        .collect();
    let report = analyze(&samples, overrides)?;
    write_report(run_dir, &report, formats)?;
    Ok(report)
}

/// One-line outcome of a pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub snapshots: usize,
    pub cells: usize,
    pub best_occupancy: usize,
    pub pigeonhole_floor: usize,
    pub center_m: usize,
    pub min_certified: Option<f64>,
    pub median_certified: Option<f64>,
    pub max_energy_drift: f64,
    pub max_enstrophy_drift: f64,
}

impl RunSummary {
    pub fn new(report: &RecurrenceReport, evolution: &Evolution) -> Self {
        let mut d: Vec<f64> = report.certified_pairs.iter().map(|p| p.distance).collect();
        d.sort_by(f64::total_cmp);
        let median = match d.len() {
            0 => None,
            n if n % 2 == 1 => Some(d[n / 2]),
            n => Some(0.5 * (d[n / 2 - 1] + d[n / 2])),
        };
        Self {
            snapshots: report.snapshot_count,
            cells: report.cells.len(),
            best_occupancy: report.return_sequence.len(),
            pigeonhole_floor: report.pigeonhole_floor,
            center_m: report.center_m,
            min_certified: d.first().copied(),
            median_certified: median,
            max_energy_drift: evolution.log.max_energy_drift,
            max_enstrophy_drift: evolution.log.max_enstrophy_drift,
        }
    }
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |x: Option<f64>| x.map_or_else(|| "n/a".to_string(), format::float);
        write!(
            f,
            "M={} cells={} best_occupancy={} pigeonhole_floor={} center_m={} min_certified={} median_certified={} energy_drift={:e} enstrophy_drift={:e}",
            self.snapshots,
            self.cells,
            self.best_occupancy,
            self.pigeonhole_floor,
            self.center_m,
            opt(self.min_certified),
            opt(self.median_certified),
            self.max_energy_drift,
            self.max_enstrophy_drift,
        )
    }
}

/// simulate → detect, writing every artifact under `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(RunSummary, RecurrenceReport), HarnessError> {
    let evolution = simulate(cfg)?;
    let report = analyze(&evolution.samples, &cfg.cover)?;
    write_report(&cfg.output_dir, &report, &cfg.export_formats)?;
    debug_assert!(cfg.wants(ExportFormat::Json) || cfg.wants(ExportFormat::Csv));
    Ok((RunSummary::new(&report, &evolution), report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotData {
    Invariants,
    ReturnMap,
    Occupancy,
}

impl PlotData {
    pub fn file_name(self) -> &'static str {
        match self {
            PlotData::Invariants => "plot_invariants.csv",
            PlotData::ReturnMap => "plot_return_map.csv",
            PlotData::Occupancy => "plot_occupancy.csv",
        }
    }
}

impl FromStr for PlotData {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "invariants" => Ok(PlotData::Invariants),
            "return_map" | "return-map" => Ok(PlotData::ReturnMap),
            "occupancy" => Ok(PlotData::Occupancy),
            other => Err(HarnessError::Config(format!(
                "unknown plot data {other:?}; expected invariants, return_map or occupancy"
            ))),
        }
    }
}

fn load_report(run_dir: &Path) -> Result<RecurrenceReport, HarnessError> {
    let path = run_dir.join(REPORT_JSON);
    let text = read_text(&path)?;
    RecurrenceReport::from_json(&text).map_err(|e| HarnessError::Parse { path, message: e.to_string() })
}

fn load_pairs(run_dir: &Path) -> Result<Vec<CertifiedPair>, HarnessError> {
    if run_dir.join(REPORT_JSON).exists() {
        return Ok(load_report(run_dir)?.certified_pairs);
    }
    let path = run_dir.join(REPORT_CSV);
    let text = read_text(&path)?;
    let bad = |message: String| HarnessError::Parse { path: path.clone(), message };
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(bad(format!("expected 3 columns in {line:?}")));
            }
            Ok(CertifiedPair {
                m_i: f[0].parse().map_err(|_| bad(format!("bad index in {line:?}")))?,
                m_j: f[1].parse().map_err(|_| bad(format!("bad index in {line:?}")))?,
                distance: f[2].parse().map_err(|_| bad(format!("bad distance in {line:?}")))?,
            })
        })
        .collect()
}

/// Writes a plot-ready CSV derived from a run's artifacts and returns its path.
pub fn export_plot_data(run_dir: &Path, what: PlotData) -> Result<PathBuf, HarnessError> {
    let text = match what {
        PlotData::Invariants => {
            let path = run_dir.join(EVOLUTION_CSV);
            let rows = parse_evolution_csv(&path, &read_text(&path)?)?;
            let mut out = String::from("time,energy,enstrophy\n");
            for (t, e, g) in rows {
                out.push_str(&format!("{},{},{}\n", format::float(t), format::float(e), format::float(g)));
            }
            out
        }
        PlotData::ReturnMap => pairs_csv(&load_pairs(run_dir)?),
        PlotData::Occupancy => {
            let mut occupancy = load_report(run_dir)?.occupancy();
            occupancy.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            let mut out = String::from("cell_id,count\n");
            for (id, count) in occupancy {
                out.push_str(&format!("{id},{count}\n"));
            }
            out
        }
    };
    let out_path = run_dir.join(what.file_name());
    write_text(&out_path, &text)?;
    Ok(out_path)
}
