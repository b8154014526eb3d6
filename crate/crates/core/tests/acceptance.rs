//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so that wall-clock budgets are measured on an otherwise idle process.

mod common;

use std::f64::consts::PI;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{c, distance_oracle, rng};
use euler_recur::dynamics::{evolve, DtPolicy, SolverConfig};
use euler_recur::harness::{generate_ic, run_experiment, CosineMode, ExperimentConfig, IcSpec, SNAPSHOT_DIR};
use euler_recur::recurrence::{
    brute_force_returns, build_net, detect_returns, pigeonhole_floor, select_mode_cutoff, CoverConfig, Snapshot,
};
use euler_recur::spectral::{
    energy, enstrophy, gradient_energy, make_vorticity, SpectralVelocity, SpectralVorticity, WaveVector,
};
use rand::Rng;

const IDENTITY_TOL: f64 = 1e-12;
const CURL_TOL: f64 = 1e-14;
const DRIFT_TOL: f64 = 1e-6;
const STEADY_TOL: f64 = 1e-12;
const CORPUS_BUDGET: Duration = Duration::from_secs(10);
const CONSERVATION_BUDGET: Duration = Duration::from_secs(120);
const DETECTION_BUDGET: Duration = Duration::from_secs(60);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

/// Band-limited fields over several resolutions, bands, mode counts and scales.
fn corpus() -> Vec<SpectralVorticity> {
    let mut r = rng(2024);
    (0..1000)
        .map(|_| {
            let n = [16usize, 32, 64, 128][r.gen_range(0..4)];
            let band = r.gen_range(1..=n as i32 / 2);
            let available = ((2 * band + 1) * (2 * band + 1) - 1) as usize / 2;
            let count = r.gen_range(1..=available.min(80));
            let scale = 10f64.powf(r.gen_range(-3.0..3.0));
            let w = common::random_field(&mut r, n, band, count);
            let entries: Vec<_> = w.modes().map(|(k, v)| (k, v * scale)).collect();
            make_vorticity(entries, n).unwrap()
        })
        .collect()
}

fn identity_suite(fields: &[SpectralVorticity], build: Duration) -> Outcome {
    let start = Instant::now();
    let worst = fields
        .iter()
        .map(|w| {
            let g = enstrophy(w);
            (gradient_energy(&w.to_velocity()) - g).abs() / g
        })
        .fold(0.0, f64::max);
    let elapsed = build + start.elapsed();
    outcome(
        worst < IDENTITY_TOL && elapsed < CORPUS_BUDGET,
        format!(
            "max relative |∫|∇u|² - ∫ω²| = {worst:e} (< {IDENTITY_TOL:e}) over {} fields in {}",
            fields.len(),
            secs(elapsed)
        ),
    )
}

fn biot_savart_suite(fields: &[SpectralVorticity]) -> Outcome {
    let mut nonzero_divergence = 0usize;
    let mut library_divergence: f64 = 0.0;
    let mut curl_err: f64 = 0.0;
    for w in fields {
        let u = w.to_velocity();
        for (k, a, b) in u.modes() {
            if a * k.k1 as f64 + b * k.k2 as f64 != c(0.0, 0.0) {
                nonzero_divergence += 1;
            }
        }
        library_divergence = library_divergence.max(u.max_divergence());
        // Curl formed here from the velocity coefficients, and through the library.
        let ours = make_vorticity(
            u.modes().map(|(k, a, b)| (k, c(0.0, k.k1 as f64) * b - c(0.0, k.k2 as f64) * a)),
            w.resolution(),
        )
        .unwrap();
        curl_err = curl_err.max(common::relative_error(&ours, w)).max(common::relative_error(&u.curl(), w));
    }
    outcome(
        nonzero_divergence == 0 && library_divergence == 0.0 && curl_err < CURL_TOL,
        format!("modes with k·û != 0: {nonzero_divergence}; max relative curl error {curl_err:e} (< {CURL_TOL:e})"),
    )
}

struct Orbit {
    label: String,
    samples: Vec<SpectralVorticity>,
}

fn conservation_suite(orbits: &mut Vec<Orbit>) -> Outcome {
    let start = Instant::now();
    let non_steady =
        IcSpec::TwoMode { modes: [CosineMode { k: [1, 0], amplitude: 1.0 }, CosineMode { k: [1, 2], amplitude: 1.0 }] };
    let band = IcSpec::RandomBand { kmin: 1, kmax: 4, enstrophy: 50.0, seed: Some(0) };
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, spec) in [("two_mode", non_steady), ("random_band", band)] {
        let w0 = generate_ic(&spec, 128).unwrap();
        let mut drifts = Vec::new();
        for dt in [4e-3, 2e-3, 1e-3] {
            let cfg = SolverConfig {
                resolution: 128,
                dt: DtPolicy::Fixed(dt),
                t_sample: 0.5,
                t_end: 5.0,
                ..SolverConfig::default()
            };
            let run = evolve(&w0, &cfg).unwrap();
            drifts.push((run.log.max_energy_drift, run.log.max_enstrophy_drift));
            orbits.push(Orbit {
                label: format!("{name} dt={dt}"),
                samples: run.samples.into_iter().map(|s| s.vorticity).collect(),
            });
        }
        let (e, g) = drifts[2];
        let monotone = drifts.windows(2).all(|p| p[1].0 < p[0].0 && p[1].1 < p[0].1);
        ok &= e < DRIFT_TOL && g < DRIFT_TOL && monotone;
        parts.push(format!(
            "{name}: E drift {:.1e}/{:.1e}/{:.1e}, G drift {:.1e}/{:.1e}/{:.1e}{}",
            drifts[0].0,
            drifts[1].0,
            drifts[2].0,
            drifts[0].1,
            drifts[1].1,
            drifts[2].1,
            if monotone { "" } else { " (not monotone)" }
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < CONSERVATION_BUDGET;
    outcome(ok, format!("N=128, t_end=5, dt=4e-3/2e-3/1e-3; {}; {}", parts.join("; "), secs(elapsed)))
}

/// Tail energy computed here from the stored modes, independent of the library's split.
fn tail_oracle(u: &SpectralVelocity, cutoff: usize) -> f64 {
    let k2 = (cutoff * cutoff) as i64;
    8.0 * PI
        * PI
        * u.modes().filter(|(k, _, _)| k.norm_sq() > k2).map(|(_, a, b)| a.norm_sqr() + b.norm_sqr()).sum::<f64>()
}

fn tail_suite(orbits: &[Orbit]) -> Outcome {
    let mut snapshots = 0usize;
    let mut violations = Vec::new();
    for orbit in orbits {
        let u0 = orbit.samples[0].to_velocity();
        let (e0, g0) = (energy(&u0), enstrophy(&orbit.samples[0]));
        let default = CoverConfig::from_initial(e0, g0).unwrap();
        let c_bound = default.enstrophy_bound;
        // The default budget plus a ladder of budgets giving cutoffs 1..=20.
        let mut covers = vec![default];
        for j in 1..=20 {
            let eps = 4.0 * c_bound / (j * j) as f64 * (1.0 + 1e-9);
            covers.push(CoverConfig::new(default.delta, Some(eps), c_bound).unwrap());
        }
        for w in &orbit.samples {
            let u = w.to_velocity();
            for cover in &covers {
                let k = cover.cutoff;
                let bound = c_bound / (k * k) as f64;
                let tail = tail_oracle(&u, k);
                if !(tail <= bound && euler_recur::recurrence::tail_energy(&u, k) <= bound) {
                    violations.push(format!("{} K={k}: {tail:e} > {bound:e}", orbit.label));
                }
                snapshots += 1;
            }
        }
    }
    let mut r = rng(99);
    let mut not_minimal = 0;
    for _ in 0..1000 {
        let cb = 10f64.powf(r.gen_range(-3.0..4.0));
        let eps = 10f64.powf(r.gen_range(-4.0..3.0));
        let k = select_mode_cutoff(cb, eps) as f64;
        let holds = 2.0 * cb / (k * k) < eps / 2.0;
        let minimal = k < 2.0 || 2.0 * cb / ((k - 1.0) * (k - 1.0)) >= eps / 2.0;
        if !(k >= 1.0 && holds && minimal) {
            not_minimal += 1;
        }
    }
    outcome(
        violations.is_empty() && not_minimal == 0,
        format!(
            "{snapshots} (snapshot, cutoff) checks, {} tail violations{}; cutoff minimality failures {not_minimal}/1000",
            violations.len(),
            violations.first().map(|v| format!(" e.g. {v}")).unwrap_or_default()
        ),
    )
}

fn to_snapshots(fields: &[Arc<SpectralVelocity>], cutoff: usize) -> Vec<Snapshot> {
    fields.iter().enumerate().map(|(m, u)| Snapshot::new(m, m as f64, u.clone(), cutoff)).collect()
}

/// Soundness and pigeonhole checks of one detection run: the number of
/// certified pairs, or the first violation found.
fn audit(label: &str, snaps: &[Snapshot], cover: &CoverConfig) -> Result<usize, String> {
    let report = detect_returns(snaps, cover).unwrap();
    let floor = pigeonhole_floor(snaps.len(), report.cells.len());
    if report.return_sequence.len() < floor {
        return Err(format!("{label}: occupancy {} below floor {floor}", report.return_sequence.len()));
    }
    let brute = brute_force_returns(snaps, cover.delta);
    for p in &report.certified_pairs {
        let d = distance_oracle(&snaps[p.m_i].field, &snaps[p.m_j].field);
        let in_brute = brute.binary_search_by_key(&(p.m_i, p.m_j), |q| (q.m_i, q.m_j)).is_ok();
        if d.is_nan() || d >= cover.delta * (1.0 + 1e-12) || !in_brute {
            return Err(format!("{label}: false certification ({}, {}) at {d:e}", p.m_i, p.m_j));
        }
    }
    Ok(report.certified_pairs.len())
}

fn detection_suite() -> Outcome {
    let start = Instant::now();
    let mut violations = Vec::new();
    let mut audits = 0;
    let mut certified = 0;
    let mut tally = |r: Result<usize, String>, violations: &mut Vec<String>| match r {
        Ok(n) => certified += n,
        Err(v) => violations.push(v),
    };

    // Steady orbit, M = 200.
    let steady = generate_ic(&IcSpec::SingleMode { k: [1, 0], amplitude: 1.0 }, 32).unwrap();
    let cfg = SolverConfig {
        resolution: 32,
        dt: DtPolicy::Fixed(0.1),
        t_sample: 0.5,
        t_end: 99.5,
        ..SolverConfig::default()
    };
    let fields: Vec<_> =
        evolve(&steady, &cfg).unwrap().samples.iter().map(|s| Arc::new(s.vorticity.to_velocity())).collect();
    let m = fields.len();
    let cover = CoverConfig::from_initial(energy(&fields[0]), gradient_energy(&fields[0])).unwrap();
    let snaps = to_snapshots(&fields, cover.cutoff);
    let report = detect_returns(&snaps, &cover).unwrap();
    let steady_max = report.certified_pairs.iter().map(|p| p.distance).fold(0.0, f64::max);
    let steady_ok = m == 200
        && report.return_sequence.len() == m
        && report.certified_pairs.len() == m * (m - 1) / 2
        && steady_max <= STEADY_TOL;
    if !steady_ok {
        violations
            .push(format!("steady: occupancy {} of {m}, max distance {steady_max:e}", report.return_sequence.len()));
    }
    tally(audit("steady", &snaps, &cover), &mut violations);
    audits += 1;

    // Evolving orbits, M = 200, across several δ.
    for (seed, kmax) in [(1u64, 3u32), (2, 5)] {
        let w0 = generate_ic(&IcSpec::RandomBand { kmin: 1, kmax, enstrophy: 20.0, seed: Some(seed) }, 32).unwrap();
        let cfg = SolverConfig {
            resolution: 32,
            dt: DtPolicy::Fixed(2e-2),
            t_sample: 0.1,
            t_end: 19.9,
            ..SolverConfig::default()
        };
        let fields: Vec<_> =
            evolve(&w0, &cfg).unwrap().samples.iter().map(|s| Arc::new(s.vorticity.to_velocity())).collect();
        let e0 = energy(&fields[0]);
        for frac in [0.05, 0.2, 0.5, 1.0] {
            let cover = CoverConfig::new(frac * e0.sqrt(), None, 2.0 * 20.0).unwrap();
            let snaps = to_snapshots(&fields, cover.cutoff);
            tally(audit(&format!("random_band seed {seed} δ={frac}√E0"), &snaps, &cover), &mut violations);
            audits += 1;
        }
    }

    // Synthetic orbits that revisit a few states with jitter.
    let mut r = rng(7);
    for trial in 0..10 {
        let base: Vec<SpectralVorticity> = (0..5).map(|_| common::random_field(&mut r, 16, 4, 8)).collect();
        let fields: Vec<_> = (0..200)
            .map(|_| {
                let w = &base[r.gen_range(0..base.len())];
                let jitter = common::random_field(&mut r, 16, 4, 3);
                let s = r.gen_range(0.0..0.1);
                Arc::new(
                    make_vorticity(w.modes().map(|(k, v)| (k, v + jitter.coeff(k) * s)), 16).unwrap().to_velocity(),
                )
            })
            .collect();
        let cover = CoverConfig::new(r.gen_range(0.3..3.0), None, 5000.0).unwrap();
        tally(audit(&format!("synthetic {trial}"), &to_snapshots(&fields, cover.cutoff), &cover), &mut violations);
        audits += 1;
    }

    let elapsed = start.elapsed();
    outcome(
        violations.is_empty() && elapsed < DETECTION_BUDGET,
        format!(
            "{audits} orbits (M=200), {certified} certified pairs: {} violations{}; steady occupancy {}/{m}, max distance {steady_max:e}; {}",
            violations.len(),
            violations.first().map(|v| format!(" e.g. {v}")).unwrap_or_default(),
            report.return_sequence.len(),
            secs(elapsed)
        ),
    )
}

/// Low modes `0 < |k| <= 2` at `N = 16`.
const WALK_MODES: [(i32, i32); 6] = [(0, 1), (0, 2), (1, -1), (1, 0), (1, 1), (2, 0)];

/// A reflected random walk in the coordinates `z_k = ω̂(k) / |k|`, where
/// `‖u‖_{L²} = 2π√2 |z|`, confined to the L² ball of radius `radius`.
fn reflected_walk(r: &mut impl Rng, steps: usize, radius: f64, step: f64) -> Vec<Arc<SpectralVelocity>> {
    let zr = radius / (2.0 * PI * 2f64.sqrt());
    let mut z = vec![0.0; 2 * WALK_MODES.len()];
    (0..steps)
        .map(|_| {
            for x in z.iter_mut() {
                *x += step * zr * r.gen_range(-1.0..1.0);
            }
            let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > zr {
                let s = (2.0 * zr - norm).max(0.0) / norm;
                z.iter_mut().for_each(|x| *x *= s);
            }
            let entries = WALK_MODES.iter().enumerate().map(|(i, &(k1, k2))| {
                let k = WaveVector::new(k1, k2);
                (k, c(z[2 * i], z[2 * i + 1]) * (k.norm_sq() as f64).sqrt())
            });
            Arc::new(make_vorticity(entries, 16).unwrap().to_velocity())
        })
        .collect()
}

fn finite_net_suite() -> Outcome {
    let radius = 1.0;
    let dim = 2 * WALK_MODES.len() as i32;
    let mut violations = Vec::new();
    let (mut min_cells, mut max_cells) = (usize::MAX, 0);
    let mut above_floor = 0;
    for seed in 0..100u64 {
        let mut r = rng(1000 + seed);
        let fields = reflected_walk(&mut r, 500, radius, 0.15);
        let delta = r.gen_range(0.5..2.0);
        let cover = CoverConfig::new(delta, None, 1e6).unwrap();
        let snaps = to_snapshots(&fields, cover.cutoff);
        let cells = build_net(&snaps, cover.radius()).unwrap();
        min_cells = min_cells.min(cells.len());
        max_cells = max_cells.max(cells.len());
        let best = cells.iter().map(|c| c.occupancy()).max().unwrap();
        if best > pigeonhole_floor(snaps.len(), cells.len()) {
            above_floor += 1;
        }
        let outside = snaps.iter().filter(|s| energy(&s.field).sqrt() > radius * (1.0 + 1e-12)).count();
        let packing = (1.0 + 4.0 * radius / delta).powi(dim);
        let separated = cells.iter().enumerate().all(|(i, a)| {
            cells[..i].iter().all(|b| snaps[a.center_index].low_mode_distance(&snaps[b.center_index]) > cover.radius())
        });
        let covered = cells.iter().all(|cell| {
            cell.members.iter().all(|&i| snaps[cell.center_index].low_mode_distance(&snaps[i]) <= cover.radius())
        });
        let members: usize = cells.iter().map(|c| c.occupancy()).sum();
        if outside > 0 || !separated || !covered || members != snaps.len() || cells.len() as f64 > packing {
            violations.push(format!("seed {seed}: net invalid ({} cells)", cells.len()));
        }
        if let Err(v) = audit(&format!("seed {seed}"), &snaps, &cover) {
            violations.push(v);
        }
    }
    outcome(
        violations.is_empty(),
        format!(
            "100 reflected walks (M=500, dim {dim}): {} violations{}; nets of {min_cells}..{max_cells} cells, floor strictly exceeded in {above_floor}",
            violations.len(),
            violations.first().map(|v| format!(" e.g. {v}")).unwrap_or_default()
        ),
    )
}

fn determinism_suite() -> Outcome {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        let cfg = ExperimentConfig {
            ic_spec: IcSpec::RandomBand { kmin: 1, kmax: 4, enstrophy: 50.0, seed: Some(11) },
            solver: SolverConfig {
                resolution: 64,
                dt: DtPolicy::Fixed(5e-3),
                t_sample: 0.25,
                t_end: 5.0,
                ..SolverConfig::default()
            },
            output_dir: dir.path().to_path_buf(),
            ..ExperimentConfig::default()
        };
        run_experiment(&cfg).unwrap();
    }
    let mut names: Vec<String> = ["snapshots.json", "evolution.csv", "recurrence.json", "recurrence.csv"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut snapshot_files: Vec<String> = fs::read_dir(dirs[0].path().join(SNAPSHOT_DIR))
        .unwrap()
        .map(|e| format!("{SNAPSHOT_DIR}/{}", e.unwrap().file_name().to_string_lossy()))
        .collect();
    snapshot_files.sort();
    let snapshot_count = snapshot_files.len();
    names.extend(snapshot_files);
    let differing: Vec<&String> = names
        .iter()
        .filter(|n| fs::read(dirs[0].path().join(n)).ok() != fs::read(dirs[1].path().join(n)).ok())
        .collect();
    outcome(
        differing.is_empty() && snapshot_count == 21,
        format!(
            "{} artifacts compared ({snapshot_count} snapshot files), {} differ{}",
            names.len(),
            differing.len(),
            differing.first().map(|n| format!(" e.g. {n}")).unwrap_or_default()
        ),
    )
}

fn run(id: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        outcome(false, format!("panicked: {msg}"))
    });
    println!("{} criterion {id} ({name}): {}", if result.passed { "PASS" } else { "FAIL" }, result.detail);
    result.passed
}

fn main() -> ExitCode {
    let build = Instant::now();
    let fields = corpus();
    let build = build.elapsed();
    let mut orbits = Vec::new();
    let results = [
        run(1, "gradient-energy identity", || identity_suite(&fields, build)),
        run(2, "Biot-Savart inversion", || biot_savart_suite(&fields)),
        run(3, "conservation", || conservation_suite(&mut orbits)),
        run(4, "tail bound and cutoff minimality", || tail_suite(&orbits)),
        run(5, "detection soundness", detection_suite),
        run(6, "finite net in a bounded ball", finite_net_suite),
        run(7, "determinism", determinism_suite),
    ];
    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
