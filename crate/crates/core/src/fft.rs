//! Square 2D transforms between Fourier coefficients and a uniform grid on `[0, 2π)²`.
//!
//! Spectral buffers are row-major `[k1][k2]` with wavenumbers stored modulo `M`.
//! Physical buffers come out transposed, `[x2][x1]`; pointwise products do not
//! care, and skipping the second transpose saves a full pass per transform.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

const ROWS_PER_TASK: usize = 16;
const PARALLEL_MIN_SIZE: usize = 128;

pub(crate) struct GridFft {
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl GridFft {
    pub(crate) fn new(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { size, forward: planner.plan_fft_forward(size), inverse: planner.plan_fft_inverse(size) }
    }

    /// Grid index of wavenumber `k` along one axis.
    pub(crate) fn wrap(&self, k: i32) -> usize {
        k.rem_euclid(self.size as i32) as usize
    }

    /// `f(x) = Σ f̂(k) e^{ik·x}`, assuming only rows `|k1| <= band` are nonzero.
    pub(crate) fn to_physical(&self, buf: &mut [Complex64], band: usize) {
        let m = self.size;
        debug_assert_eq!(buf.len(), m * m);
        if 2 * band + 1 >= m {
            run_rows(&*self.inverse, buf, m);
        } else {
            let (head, rest) = buf.split_at_mut((band + 1) * m);
            run_rows(&*self.inverse, head, m);
            let tail_start = rest.len() - band * m;
            run_rows(&*self.inverse, &mut rest[tail_start..], m);
        }
        transpose(buf, m);
        run_rows(&*self.inverse, buf, m);
    }

    /// `f̂(k) = M⁻² Σ_x f(x) e^{-ik·x}` from a transposed physical buffer.
    /// Only rows `|k1| <= band` of the result are valid.
    pub(crate) fn to_spectral(&self, buf: &mut [Complex64], band: usize) {
        let m = self.size;
        debug_assert_eq!(buf.len(), m * m);
        run_rows(&*self.forward, buf, m);
        transpose(buf, m);
        let scale = 1.0 / (m * m) as f64;
        let finish = |rows: &mut [Complex64]| {
            run_rows(&*self.forward, rows, m);
            rows.iter_mut().for_each(|c| *c *= scale);
        };
        if 2 * band + 1 >= m {
            finish(buf);
        } else {
            let (head, rest) = buf.split_at_mut((band + 1) * m);
            finish(head);
            let tail_start = rest.len() - band * m;
            finish(&mut rest[tail_start..]);
        }
    }
}

fn run_rows(fft: &dyn Fft<f64>, rows: &mut [Complex64], m: usize) {
    if rows.is_empty() {
        return;
    }
    let scratch_len = fft.get_inplace_scratch_len();
    if m < PARALLEL_MIN_SIZE {
        let mut scratch = vec![Complex64::new(0.0, 0.0); scratch_len];
        fft.process_with_scratch(rows, &mut scratch);
        return;
    }
    rows.par_chunks_mut(ROWS_PER_TASK * m).for_each_init(
        || vec![Complex64::new(0.0, 0.0); scratch_len],
        |scratch, chunk| fft.process_with_scratch(chunk, scratch),
    );
}

fn transpose(buf: &mut [Complex64], m: usize) {
    const BLOCK: usize = 16;
    for bi in (0..m).step_by(BLOCK) {
        for bj in (bi..m).step_by(BLOCK) {
            for i in bi..(bi + BLOCK).min(m) {
                let start = if bi == bj { i + 1 } else { bj };
                for j in start..(bj + BLOCK).min(m) {
                    buf.swap(i * m + j, j * m + i);
                }
            }
        }
    }
}
