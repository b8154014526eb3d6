//! Independent reference computations used by the integration suites.
//!
//! Nothing here calls into the FFT path: fields are evaluated by direct
//! summation, products by explicit convolution, norms by grid quadrature.

#![allow(dead_code)]

use std::f64::consts::PI;

use euler_recur::spectral::{make_vorticity, SpectralVelocity, SpectralVorticity, WaveVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` distinct random representatives with `max(|k1|, |k2|) <= band`.
pub fn random_field(rng: &mut impl Rng, n: usize, band: i32, count: usize) -> SpectralVorticity {
    let mut modes: Vec<WaveVector> = Vec::new();
    while modes.len() < count {
        let k = WaveVector::new(rng.gen_range(-band..=band), rng.gen_range(-band..=band));
        if k.is_zero() {
            continue;
        }
        let (rep, _) = k.canonical();
        if !modes.contains(&rep) {
            modes.push(rep);
        }
    }
    let entries = modes.into_iter().map(|k| (k, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
    make_vorticity(entries, n).unwrap()
}

/// Every nonzero `ω̂(k)` over the full plane, both members of each `±k` pair.
pub fn full_modes(w: &SpectralVorticity) -> Vec<(i32, i32, Complex64)> {
    let h = w.resolution() as i32 / 2;
    let mut out = Vec::new();
    for k1 in -h..=h {
        for k2 in -h..=h {
            let v = w.coeff(WaveVector::new(k1, k2));
            if v != c(0.0, 0.0) {
                out.push((k1, k2, v));
            }
        }
    }
    out
}

/// Velocity coefficients straight from the textbook formula.
pub fn velocity_oracle(k1: i32, k2: i32, w: Complex64) -> (Complex64, Complex64) {
    let k2f = (k1 * k1 + k2 * k2) as f64;
    (c(0.0, k2 as f64) * w / k2f, c(0.0, -(k1 as f64)) * w / k2f)
}

/// `Σ f̂(k) e^{ik·x}` at a point; real part of a Hermitian sum.
pub fn eval(modes: &[(i32, i32, Complex64)], x1: f64, x2: f64) -> f64 {
    modes
        .iter()
        .map(|&(k1, k2, a)| {
            let phase = k1 as f64 * x1 + k2 as f64 * x2;
            a.re * phase.cos() - a.im * phase.sin()
        })
        .sum()
}

/// Midpoint-free rectangle rule on an `m × m` grid; exact for trigonometric
/// polynomials of degree below `m`.
pub fn quadrature(m: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
    let h = 2.0 * PI / m as f64;
    let mut total = 0.0;
    for i in 0..m {
        let mut row = 0.0;
        for j in 0..m {
            row += f(i as f64 * h, j as f64 * h);
        }
        total += row;
    }
    total * h * h
}

/// `-(u·∇)ω` by explicit convolution over all mode pairs, restricted to `|k_i| <= out_band`.
pub fn convolution_rhs(w: &SpectralVorticity, out_band: i32) -> Vec<(i32, i32, Complex64)> {
    let modes = full_modes(w);
    let mut out = Vec::new();
    for k1 in -out_band..=out_band {
        for k2 in -out_band..=out_band {
            if k1 == 0 && k2 == 0 {
                continue;
            }
            let mut acc = c(0.0, 0.0);
            for &(p1, p2, wp) in &modes {
                let (q1, q2) = (k1 - p1, k2 - p2);
                let Some(&(_, _, wq)) = modes.iter().find(|m| m.0 == q1 && m.1 == q2) else {
                    continue;
                };
                let (u1, u2) = velocity_oracle(p1, p2, wp);
                acc -= (u1 * q1 as f64 + u2 * q2 as f64) * c(0.0, 1.0) * wq;
            }
            out.push((k1, k2, acc));
        }
    }
    out
}

/// `‖a - b‖_{L²}` from coefficient differences over the full plane.
pub fn distance_oracle(a: &SpectralVelocity, b: &SpectralVelocity) -> f64 {
    let h = a.resolution().max(b.resolution()) as i32 / 2;
    let mut sum = 0.0;
    for k1 in -h..=h {
        for k2 in -h..=h {
            let k = WaveVector::new(k1, k2);
            let (a1, a2) = a.coeff(k);
            let (b1, b2) = b.coeff(k);
            sum += (a1 - b1).norm_sqr() + (a2 - b2).norm_sqr();
        }
    }
    (4.0 * PI * PI * sum).sqrt()
}

/// Relative coefficient-space error `‖a - b‖ / ‖b‖`.
pub fn relative_error(a: &SpectralVorticity, b: &SpectralVorticity) -> f64 {
    let num: f64 = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.coeffs().iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}
