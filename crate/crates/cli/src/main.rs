use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use euler_recur::harness::{
    configure_threads_from_env, detect, export_plot_data, run_experiment, self_test, simulate, ExperimentConfig,
    HarnessError, PlotData, RUN_CONFIG,
};
use euler_recur::DtPolicy;

/// Pseudo-spectral 2D Euler on the torus with recurrence detection.
#[derive(Parser)]
#[command(name = "euler-recur", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the initial condition and write snapshots, index and evolution CSV.
    Simulate(Overrides),
    /// Build the δ-net over an existing run directory and write the recurrence report.
    Detect(Overrides),
    /// Simulate, then detect.
    Run(Overrides),
    /// Spectral identity and conservation self-test.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write plot-ready CSV (invariants, return_map, occupancy) from a run directory.
    Export {
        what: String,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Overrides {
    /// JSON file mirroring the experiment configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    resolution: Option<usize>,
    /// Fixed time step; replaces any CFL policy from the config.
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_end: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sample_period: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Run directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

impl Overrides {
    fn apply(&self, mut cfg: ExperimentConfig) -> ExperimentConfig {
        if let Some(seed) = self.seed {
            cfg.ic_spec.set_seed(seed);
        }
        if let Some(n) = self.resolution {
            cfg.solver.resolution = n;
        }
        if let Some(dt) = self.dt {
            cfg.solver.dt = DtPolicy::Fixed(dt);
        }
        if let Some(t) = self.t_end {
            cfg.solver.t_end = t;
        }
        if let Some(t) = self.sample_period {
            cfg.solver.t_sample = t;
        }
        if let Some(d) = self.delta {
            cfg.cover.delta = Some(d);
        }
        if let Some(dir) = &self.out {
            cfg.output_dir = dir.clone();
        }
        cfg
    }

    fn config(&self) -> Result<ExperimentConfig, HarnessError> {
        let base = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let cfg = self.apply(base);
        cfg.validate()?;
        Ok(cfg)
    }

    /// For `detect`, a run directory's own config supplies defaults when no `--config` is given.
    fn detect_config(&self) -> Result<ExperimentConfig, HarnessError> {
        if self.config.is_some() {
            return self.config();
        }
        let dir = self.out.clone().unwrap_or_else(|| ExperimentConfig::default().output_dir);
        let saved = dir.join(RUN_CONFIG);
        let base = if saved.exists() { ExperimentConfig::load(&saved)? } else { ExperimentConfig::default() };
        // The directory being read wins over wherever the run was first written.
        let cfg = ExperimentConfig { output_dir: dir, ..self.apply(base) };
        cfg.cover.validate()?;
        Ok(cfg)
    }
}

/// `Ok(false)` when the self-test ran but a check failed.
fn run(cli: Cli) -> Result<bool, HarnessError> {
    configure_threads_from_env()?;
    match cli.command {
        Command::Simulate(o) => {
            let cfg = o.config()?;
            let evolution = simulate(&cfg)?;
            println!(
                "M={} energy_drift={:e} enstrophy_drift={:e} out={}",
                evolution.samples.len(),
                evolution.log.max_energy_drift,
                evolution.log.max_enstrophy_drift,
                cfg.output_dir.display()
            );
        }
        Command::Detect(o) => {
            let cfg = o.detect_config()?;
            let report = detect(&cfg.output_dir, &cfg.cover, &cfg.export_formats)?;
            let d: Vec<f64> = report.certified_pairs.iter().map(|p| p.distance).collect();
            println!(
                "M={} cells={} best_occupancy={} pigeonhole_floor={} certified_pairs={} min_certified={}",
                report.snapshot_count,
                report.cells.len(),
                report.return_sequence.len(),
                report.pigeonhole_floor,
                d.len(),
                d.iter().copied().reduce(f64::min).map_or_else(|| "n/a".to_string(), |x| format!("{x:?}")),
            );
        }
        Command::Run(o) => {
            let cfg = o.config()?;
            let (summary, _) = run_experiment(&cfg)?;
            println!("{summary}");
        }
        Command::Verify { seed } => {
            let checks = self_test(seed)?;
            for c in &checks {
                println!("{c}");
            }
            return Ok(checks.iter().all(|c| c.passed));
        }
        Command::Export { what, out, config } => {
            let what: PlotData = what.parse()?;
            let dir = match (out, config) {
                (Some(dir), _) => dir,
                (None, Some(path)) => ExperimentConfig::load(&path)?.output_dir,
                (None, None) => ExperimentConfig::default().output_dir,
            };
            println!("{}", export_plot_data(Path::new(&dir), what)?.display());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
