use num_complex::Complex64;

use crate::fft::GridFft;
use crate::spectral::{biot_savart, SpectralVorticity};

use super::DynamicsError;

/// Where each retained representative lives on the quadrature grid.
#[derive(Debug, Clone, Copy)]
struct Slot {
    index: usize,
    k1: f64,
    k2: f64,
    pos: usize,
    neg: usize,
}

/// Pseudo-spectral evaluator of `∂_t ω = -u·∇ω` at a fixed resolution.
///
/// With `dealias` the product is formed on the `N` grid from modes
/// `|k1|, |k2| <= ⌊(N-1)/3⌋` and truncated back to that box (two-thirds rule).
/// Without it, all representable modes are used on a padded `2N` grid, which
/// is alias free for every output `|k_i| <= N/2`. Either way the result equals
/// the exact truncated convolution up to rounding.
pub struct EulerRhs {
    resolution: usize,
    dealias: bool,
    band: usize,
    grid: GridFft,
    slots: Vec<Slot>,
    velocity: Vec<Complex64>,
    gradient: Vec<Complex64>,
}

impl EulerRhs {
    pub fn new(resolution: usize, dealias: bool) -> Result<Self, DynamicsError> {
        let probe = SpectralVorticity::zeros(resolution)?;
        let layout = probe.layout();
        let (size, band) = if dealias { (resolution, (resolution - 1) / 3) } else { (2 * resolution, resolution / 2) };
        let grid = GridFft::new(size);
        let slots = layout
            .iter()
            .enumerate()
            .filter(|(_, k)| k.max_abs() as usize <= band)
            .map(|(index, k)| Slot {
                index,
                k1: k.k1 as f64,
                k2: k.k2 as f64,
                pos: grid.wrap(k.k1) * size + grid.wrap(k.k2),
                neg: grid.wrap(-k.k1) * size + grid.wrap(-k.k2),
            })
            .collect();
        let zero = vec![Complex64::new(0.0, 0.0); size * size];
        Ok(Self { resolution, dealias, band, grid, slots, velocity: zero.clone(), gradient: zero })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn dealias(&self) -> bool {
        self.dealias
    }

    /// Largest `|k1|` or `|k2|` that takes part in the product and survives in the output.
    pub fn band(&self) -> usize {
        self.band
    }

    /// Packs `u1 + i u2` into the velocity buffer and `∂1ω + i ∂2ω` into the gradient buffer.
    fn load(&mut self, w: &SpectralVorticity) {
        self.velocity.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        self.gradient.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        let layout = w.layout();
        let coeffs = w.coeffs();
        let i = Complex64::i();
        for s in &self.slots {
            let c = coeffs[s.index];
            let (u1, u2) = biot_savart(layout.wave_at(s.index), c);
            let (d1, d2) = (i * s.k1 * c, i * s.k2 * c);
            self.velocity[s.pos] = u1 + i * u2;
            self.velocity[s.neg] = u1.conj() + i * u2.conj();
            self.gradient[s.pos] = d1 + i * d2;
            self.gradient[s.neg] = d1.conj() + i * d2.conj();
        }
    }

    /// `-u·∇ω` with zero mean, written into `out` (same resolution as `w`).
    pub fn eval_into(&mut self, w: &SpectralVorticity, out: &mut SpectralVorticity) {
        assert_eq!(w.resolution(), self.resolution, "field resolution does not match the evaluator");
        assert_eq!(out.resolution(), self.resolution, "output resolution does not match the evaluator");
        self.load(w);
        self.grid.to_physical(&mut self.velocity, self.band);
        self.grid.to_physical(&mut self.gradient, self.band);
        for (u, g) in self.velocity.iter_mut().zip(&self.gradient) {
            *u = Complex64::new(-(u.re * g.re + u.im * g.im), 0.0);
        }
        self.grid.to_spectral(&mut self.velocity, self.band);
        let dst = out.coeffs_mut();
        dst.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        for s in &self.slots {
            dst[s.index] = self.velocity[s.pos];
        }
    }

    pub fn eval(&mut self, w: &SpectralVorticity) -> SpectralVorticity {
        let mut out = SpectralVorticity::zeros(self.resolution).expect("resolution validated at construction");
        self.eval_into(w, &mut out);
        out
    }

    /// Largest grid value of `|u|`.
    pub fn max_speed(&mut self, w: &SpectralVorticity) -> f64 {
        self.load(w);
        self.grid.to_physical(&mut self.velocity, self.band);
        self.velocity.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// One classical four-stage Runge–Kutta step.
    pub fn step_rk4(&mut self, w: &SpectralVorticity, dt: f64) -> Result<SpectralVorticity, DynamicsError> {
        let n = self.resolution;
        let zeros = || SpectralVorticity::zeros(n).expect("validated resolution");
        let (mut k1, mut k2, mut k3, mut k4) = (zeros(), zeros(), zeros(), zeros());
        let mut stage = w.clone();

        self.eval_into(w, &mut k1);
        axpy_into(stage.coeffs_mut(), w.coeffs(), 0.5 * dt, k1.coeffs());
        self.eval_into(&stage, &mut k2);
        axpy_into(stage.coeffs_mut(), w.coeffs(), 0.5 * dt, k2.coeffs());
        self.eval_into(&stage, &mut k3);
        axpy_into(stage.coeffs_mut(), w.coeffs(), dt, k3.coeffs());
        self.eval_into(&stage, &mut k4);

        let sixth = dt / 6.0;
        let next = stage.coeffs_mut();
        for (i, dst) in next.iter_mut().enumerate() {
            let incr = k1.coeffs()[i] + 2.0 * k2.coeffs()[i] + 2.0 * k3.coeffs()[i] + k4.coeffs()[i];
            *dst = w.coeffs()[i] + sixth * incr;
        }
        if !stage.is_finite() {
            return Err(DynamicsError::BlowupDetected { time: f64::NAN });
        }
        Ok(stage)
    }
}

fn axpy_into(dst: &mut [Complex64], base: &[Complex64], a: f64, x: &[Complex64]) {
    for ((d, b), v) in dst.iter_mut().zip(base).zip(x) {
        *d = b + a * v;
    }
}

/// `-u·∇ω` for a single field; see [`EulerRhs`].
pub fn rhs(w: &SpectralVorticity, dealias: bool) -> SpectralVorticity {
    EulerRhs::new(w.resolution(), dealias).expect("field resolution is valid").eval(w)
}

/// One RK4 step of the dealiased flow.
pub fn step_rk4(w: &SpectralVorticity, dt: f64) -> Result<SpectralVorticity, DynamicsError> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(DynamicsError::InvalidConfig(format!("time step must be positive, got {dt}")));
    }
    EulerRhs::new(w.resolution(), true)?.step_rk4(w, dt)
}

pub const DEFAULT_DT_FLOOR: f64 = 1e-2;

/// `σ (2π/N) / max|u|`, or `dt_floor` when the flow is at rest.
pub fn cfl_dt(w: &SpectralVorticity, sigma: f64, dt_floor: f64) -> f64 {
    EulerRhs::new(w.resolution(), true).expect("field resolution is valid").cfl_dt(w, sigma, dt_floor)
}

impl EulerRhs {
    pub fn cfl_dt(&mut self, w: &SpectralVorticity, sigma: f64, dt_floor: f64) -> f64 {
        assert!(sigma > 0.0 && sigma <= 1.0, "CFL safety factor must lie in (0, 1], got {sigma}");
        let speed = self.max_speed(w);
        if speed == 0.0 {
            return dt_floor;
        }
        sigma * (2.0 * std::f64::consts::PI / self.resolution as f64) / speed
    }
}
