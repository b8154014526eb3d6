use num_complex::Complex64;

use super::modes::{ModeLayout, WaveVector};
use super::SpectralError;

/// How a `(0, 0)` coefficient is treated on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeanPolicy {
    /// A nonzero mean coefficient is an error.
    #[default]
    Strict,
    /// A mean coefficient is silently dropped.
    Lenient,
}

pub(crate) fn check_resolution(resolution: usize) -> Result<(), SpectralError> {
    if resolution < 4 || !resolution.is_multiple_of(2) || resolution > (1 << 20) {
        return Err(SpectralError::InvalidResolution(resolution));
    }
    Ok(())
}

/// Accumulates user entries into half-plane storage, closing under `ω̂(-k) = conj ω̂(k)`.
struct HermitianBuilder<T> {
    layout: ModeLayout,
    slots: Vec<Option<(T, bool)>>,
}

impl<T: Copy + PartialEq> HermitianBuilder<T> {
    fn new(layout: ModeLayout) -> Self {
        Self { layout, slots: vec![None; layout.len()] }
    }

    /// `value` is given at `k`; `conj` maps it to the value at `-k`.
    fn insert(&mut self, k: WaveVector, value: T, conj: impl Fn(T) -> T) -> Result<(), SpectralError> {
        if !self.layout.contains(k) {
            return Err(SpectralError::ModeOutOfRange { k1: k.k1, k2: k.k2, resolution: self.layout.resolution() });
        }
        let (rep, negated) = k.canonical();
        let stored = if negated { conj(value) } else { value };
        let idx = self.layout.index_of(rep).expect("representable representative");
        match self.slots[idx] {
            None => self.slots[idx] = Some((stored, negated)),
            Some((existing, _)) if existing == stored => {}
            Some((_, was_negated)) if was_negated != negated => {
                return Err(SpectralError::NonHermitianInput { k1: rep.k1, k2: rep.k2 });
            }
            Some(_) => return Err(SpectralError::DuplicateMode { k1: k.k1, k2: k.k2 }),
        }
        Ok(())
    }

    fn finish(self, zero: T) -> Vec<T> {
        self.slots.into_iter().map(|s| s.map_or(zero, |(v, _)| v)).collect()
    }
}

fn check_finite(k: WaveVector, values: &[Complex64]) -> Result<(), SpectralError> {
    if values.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(SpectralError::NonFinite { k1: k.k1, k2: k.k2 })
    }
}

/// Scalar vorticity `ω(x) = Σ_k ω̂(k) e^{ik·x}` on `[0, 2π)²`, mean zero and real.
///
/// Only one member of each `±k` pair is stored; the other is its conjugate.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVorticity {
    layout: ModeLayout,
    coeffs: Vec<Complex64>,
}

impl SpectralVorticity {
    pub fn zeros(resolution: usize) -> Result<Self, SpectralError> {
        check_resolution(resolution)?;
        let layout = ModeLayout::new(resolution);
        Ok(Self { layout, coeffs: vec![Complex64::new(0.0, 0.0); layout.len()] })
    }

    /// Builds a field from `(k, ω̂(k))` entries, filling in missing conjugate partners.
    pub fn from_entries<I>(entries: I, resolution: usize, mean: MeanPolicy) -> Result<Self, SpectralError>
    where
        I: IntoIterator<Item = (WaveVector, Complex64)>,
    {
        check_resolution(resolution)?;
        let layout = ModeLayout::new(resolution);
        let mut builder = HermitianBuilder::new(layout);
        for (k, c) in entries {
            check_finite(k, &[c])?;
            if k.is_zero() {
                if mean == MeanPolicy::Strict && c != Complex64::new(0.0, 0.0) {
                    return Err(SpectralError::MeanNotZero);
                }
                continue;
            }
            builder.insert(k, c, |v| v.conj())?;
        }
        Ok(Self { layout, coeffs: builder.finish(Complex64::new(0.0, 0.0)) })
    }

    pub fn resolution(&self) -> usize {
        self.layout.resolution()
    }

    pub fn layout(&self) -> ModeLayout {
        self.layout
    }

    /// `ω̂(k)` for any `k`; zero outside the representable box and at the origin.
    pub fn coeff(&self, k: WaveVector) -> Complex64 {
        if k.is_zero() || !self.layout.contains(k) {
            return Complex64::new(0.0, 0.0);
        }
        let (rep, negated) = k.canonical();
        let c = self.coeffs[self.layout.index_of(rep).unwrap()];
        if negated {
            c.conj()
        } else {
            c
        }
    }

    /// Stored representatives with their coefficients, in lexicographic order.
    pub fn modes(&self) -> impl Iterator<Item = (WaveVector, Complex64)> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, c)| (self.layout.wave_at(i), *c))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Zeroes every mode with `max(|k1|, |k2|) > band`.
    pub fn truncated(&self, band: u32) -> Self {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            if self.layout.wave_at(i).max_abs() > band {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    /// Velocity by the torus Biot–Savart law `û(k) = (i k2, -i k1) ω̂(k) / |k|²`.
    pub fn to_velocity(&self) -> SpectralVelocity {
        let (u1, u2) = self.modes().map(|(k, w)| biot_savart(k, w)).unzip();
        SpectralVelocity { layout: self.layout, u1, u2 }
    }
}

/// Velocity field `u = (u1, u2)`, mean zero, real, spectrally divergence free.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVelocity {
    layout: ModeLayout,
    u1: Vec<Complex64>,
    u2: Vec<Complex64>,
}

impl SpectralVelocity {
    pub fn zeros(resolution: usize) -> Result<Self, SpectralError> {
        check_resolution(resolution)?;
        let layout = ModeLayout::new(resolution);
        let z = vec![Complex64::new(0.0, 0.0); layout.len()];
        Ok(Self { layout, u1: z.clone(), u2: z })
    }

    /// Builds a velocity from `(k, û1(k), û2(k))` entries with Hermitian closure.
    ///
    /// Entries must satisfy `k1 û1 + k2 û2 = 0` to within `1e-12` of `|k| |û|`.
    pub fn from_entries<I>(entries: I, resolution: usize) -> Result<Self, SpectralError>
    where
        I: IntoIterator<Item = (WaveVector, Complex64, Complex64)>,
    {
        check_resolution(resolution)?;
        let layout = ModeLayout::new(resolution);
        let mut builder = HermitianBuilder::new(layout);
        for (k, a, b) in entries {
            check_finite(k, &[a, b])?;
            if k.is_zero() {
                if a != Complex64::new(0.0, 0.0) || b != Complex64::new(0.0, 0.0) {
                    return Err(SpectralError::MeanNotZero);
                }
                continue;
            }
            let div = a * k.k1 as f64 + b * k.k2 as f64;
            let scale = (k.norm_sq() as f64).sqrt() * (a.norm_sqr() + b.norm_sqr()).sqrt();
            if div.norm() > 1e-12 * scale {
                return Err(SpectralError::Divergent { k1: k.k1, k2: k.k2 });
            }
            builder.insert(k, (a, b), |(x, y)| (x.conj(), y.conj()))?;
        }
        let zero = Complex64::new(0.0, 0.0);
        let (u1, u2) = builder.finish((zero, zero)).into_iter().unzip();
        Ok(Self { layout, u1, u2 })
    }

    pub fn resolution(&self) -> usize {
        self.layout.resolution()
    }

    pub fn layout(&self) -> ModeLayout {
        self.layout
    }

    /// `(û1(k), û2(k))` for any `k`; zero outside the box and at the origin.
    pub fn coeff(&self, k: WaveVector) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        if k.is_zero() || !self.layout.contains(k) {
            return (zero, zero);
        }
        let (rep, negated) = k.canonical();
        let i = self.layout.index_of(rep).unwrap();
        let (a, b) = (self.u1[i], self.u2[i]);
        if negated {
            (a.conj(), b.conj())
        } else {
            (a, b)
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = (WaveVector, Complex64, Complex64)> + '_ {
        (0..self.layout.len()).map(move |i| (self.layout.wave_at(i), self.u1[i], self.u2[i]))
    }

    pub fn components(&self) -> (&[Complex64], &[Complex64]) {
        (&self.u1, &self.u2)
    }

    /// Scalar curl `ω̂(k) = i k1 û2(k) - i k2 û1(k)`.
    pub fn curl(&self) -> SpectralVorticity {
        let coeffs = self
            .modes()
            .map(|(k, a, b)| {
                let (k1, k2) = (k.k1 as f64, k.k2 as f64);
                Complex64::new(k2 * a.im - k1 * b.im, k1 * b.re - k2 * a.re)
            })
            .collect();
        SpectralVorticity { layout: self.layout, coeffs }
    }

    /// Largest `|k1 û1(k) + k2 û2(k)|` over stored modes.
    pub fn max_divergence(&self) -> f64 {
        self.modes().map(|(k, a, b)| (a * k.k1 as f64 + b * k.k2 as f64).norm()).fold(0.0, f64::max)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Rounds `x` to `53 - bits` significant bits (Veltkamp split).
fn round_to_bits(x: f64, bits: u32) -> f64 {
    if bits == 0 || !x.is_finite() {
        return x;
    }
    let c = ((1u64 << bits) + 1) as f64 * x;
    let hi = c - (c - x);
    if hi.is_finite() {
        hi
    } else {
        x
    }
}

/// Biot–Savart inversion of one mode.
///
/// With `g = gcd(k1, k2)`, `k = g (a, b)` and `q = g ω̂ / |k|²`, the velocity is
/// `(i b q, -i a q)`. `q` is rounded to a precision where `a q` and `b q` are
/// exact, so `k1 û1 + k2 û2` evaluates to exactly zero in floating point.
pub(crate) fn biot_savart(k: WaveVector, w: Complex64) -> (Complex64, Complex64) {
    let g = gcd(k.k1.unsigned_abs() as u64, k.k2.unsigned_abs() as u64);
    if g == 0 {
        return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    }
    let a = (k.k1 as i64 / g as i64) as f64;
    let b = (k.k2 as i64 / g as i64) as f64;
    let m = (k.k1.unsigned_abs() as u64 / g).max(k.k2.unsigned_abs() as u64 / g);
    let bits = if m <= 1 { 0 } else { 64 - m.leading_zeros() };
    let scale = g as f64 / k.norm_sq() as f64;
    let q = Complex64::new(round_to_bits(w.re * scale, bits), round_to_bits(w.im * scale, bits));
    (Complex64::new(-b * q.im, b * q.re), Complex64::new(a * q.im, -a * q.re))
}
