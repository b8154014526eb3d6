//! Pseudo-spectral 2D incompressible Euler on the periodic torus, with an
//! L² recurrence detector built on a greedy δ-net over sampled snapshots.
//!
//! * [`spectral`]: truncated Fourier fields, Biot–Savart inversion, norms.
//! * [`dynamics`]: dealiased pseudo-spectral right-hand side, RK4, sampled evolution.
//! * [`recurrence`]: mode cutoff selection, tail bounds, δ-net cover, return certification.
//! * [`harness`]: initial conditions, experiment configuration, artifact I/O.

pub mod dynamics;
pub mod harness;
pub mod recurrence;
pub mod spectral;

mod fft;
mod format;

pub use dynamics::{evolve, DtPolicy, DynamicsError, Evolution, EvolutionLog, OrbitSample, SolverConfig};
pub use recurrence::{detect_returns, CoverConfig, RecurrenceError, RecurrenceReport, Snapshot};
pub use spectral::{SpectralError, SpectralVelocity, SpectralVorticity, WaveVector};
