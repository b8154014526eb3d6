use serde::{Deserialize, Serialize};

/// Integer Fourier index `(k1, k2)` of the mode `e^{i(k1 x1 + k2 x2)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WaveVector {
    pub k1: i32,
    pub k2: i32,
}

impl WaveVector {
    pub const fn new(k1: i32, k2: i32) -> Self {
        Self { k1, k2 }
    }

    pub fn norm_sq(self) -> i64 {
        let (a, b) = (self.k1 as i64, self.k2 as i64);
        a * a + b * b
    }

    pub fn is_zero(self) -> bool {
        self.k1 == 0 && self.k2 == 0
    }

    /// True for the stored member of a `±k` pair: `k1 > 0`, or `k1 == 0` and `k2 > 0`.
    pub fn is_representative(self) -> bool {
        self.k1 > 0 || (self.k1 == 0 && self.k2 > 0)
    }

    /// The stored member of this vector's `±k` pair, and whether `self` is its negation.
    pub fn canonical(self) -> (WaveVector, bool) {
        if self.is_representative() {
            (self, false)
        } else {
            (-self, true)
        }
    }

    /// Largest absolute component; the box "radius" used for representability and dealiasing.
    pub fn max_abs(self) -> u32 {
        self.k1.unsigned_abs().max(self.k2.unsigned_abs())
    }
}

impl std::ops::Neg for WaveVector {
    type Output = WaveVector;
    fn neg(self) -> WaveVector {
        WaveVector::new(-self.k1, -self.k2)
    }
}

impl From<(i32, i32)> for WaveVector {
    fn from((k1, k2): (i32, i32)) -> Self {
        Self::new(k1, k2)
    }
}

/// Dense half-plane storage layout for resolution `N`.
///
/// Representatives are every `k` with `|k1|, |k2| <= N/2` on the positive
/// side of the `±k` split, enumerated lexicographically in `(k1, k2)`:
/// first `(0, 1..=N/2)`, then for each `k1 = 1..=N/2` the run `k2 = -N/2..=N/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeLayout {
    resolution: usize,
}

impl ModeLayout {
    pub(crate) fn new(resolution: usize) -> Self {
        Self { resolution }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// `N/2`, the largest representable `|k1|` or `|k2|`.
    pub fn half(&self) -> i32 {
        (self.resolution / 2) as i32
    }

    pub fn len(&self) -> usize {
        let h = self.resolution / 2;
        h + h * (self.resolution + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, k: WaveVector) -> bool {
        k.max_abs() as i32 <= self.half()
    }

    /// Storage slot of a representative; `None` if `k` is not a representative or not representable.
    pub fn index_of(&self, k: WaveVector) -> Option<usize> {
        if !k.is_representative() || !self.contains(k) {
            return None;
        }
        let h = self.half();
        let idx = if k.k1 == 0 {
            (k.k2 - 1) as usize
        } else {
            h as usize + (k.k1 - 1) as usize * (self.resolution + 1) + (k.k2 + h) as usize
        };
        Some(idx)
    }

    pub fn wave_at(&self, idx: usize) -> WaveVector {
        let h = self.resolution / 2;
        if idx < h {
            WaveVector::new(0, idx as i32 + 1)
        } else {
            let r = idx - h;
            let row = self.resolution + 1;
            WaveVector::new((r / row) as i32 + 1, (r % row) as i32 - h as i32)
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = WaveVector> + '_ {
        (0..self.len()).map(move |i| self.wave_at(i))
    }
}
