use super::{IntegerBox, LatticeFunction};

/// Zero-padded summed-area table of `|f|`: entry `k` (padded index) is the
/// sum of `|f|` over `[origin, origin + k - 1]`.
#[derive(Debug, Clone)]
pub struct PrefixSumTable {
    hull: IntegerBox,
    padded: Vec<usize>,
    strides: Vec<usize>,
    table: Vec<f64>,
}

impl PrefixSumTable {
    pub fn new(f: &LatticeFunction) -> Self {
        let hull = f.hull().clone();
        let d = hull.dim();
        let padded: Vec<usize> = hull.extents().iter().map(|e| e + 1).collect();
        let mut strides = vec![1usize; d];
        for i in (0..d.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * padded[i + 1];
        }
        let total: usize = padded.iter().product();
        let mut table = vec![0.0; total];
        for (src, v) in f.values().iter().enumerate() {
            let p = hull.point_at(src);
            let idx: usize = (0..d).map(|i| (p[i] - hull.lo()[i] + 1) as usize * strides[i]).sum();
            table[idx] = v.abs();
        }
        // One compensated cumulative pass per axis.
        for axis in 0..d {
            let len = padded[axis];
            let stride = strides[axis];
            for start in 0..total {
                if !(start / stride).is_multiple_of(len) {
                    continue;
                }
                let (mut sum, mut comp) = (0.0f64, 0.0f64);
                for k in 0..len {
                    let idx = start + k * stride;
                    let x = table[idx];
                    let t = sum + x;
                    if sum.abs() >= x.abs() {
                        comp += (sum - t) + x;
                    } else {
                        comp += (x - t) + sum;
                    }
                    sum = t;
                    table[idx] = sum + comp;
                }
            }
        }
        Self {
            hull,
            padded,
            strides,
            table,
        }
    }

    pub fn hull(&self) -> &IntegerBox {
        &self.hull
    }

    /// `Σ_{k ∈ box} |f(k)|`; parts of the box outside the hull contribute 0.
    pub fn box_sum(&self, b: &IntegerBox) -> f64 {
        self.box_sum_bounds(b.lo(), b.hi())
    }

    /// Same as [`box_sum`](Self::box_sum) on raw corners; `lo > hi` on any axis gives 0.
    pub fn box_sum_bounds(&self, lo: &[i64], hi: &[i64]) -> f64 {
        let d = self.hull.dim();
        let mut lo_idx = [0usize; 3];
        let mut hi_idx = [0usize; 3];
        for i in 0..d {
            let base = self.hull.lo()[i];
            let l = (lo[i] - base).max(0);
            let h = (hi[i] - base + 1).min(self.padded[i] as i64 - 1);
            if l >= h {
                return 0.0;
            }
            lo_idx[i] = l as usize;
            hi_idx[i] = h as usize;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << d) {
            let mut idx = 0;
            let mut sign = 1.0;
            for i in 0..d {
                if corner >> i & 1 == 1 {
                    idx += lo_idx[i] * self.strides[i];
                    sign = -sign;
                } else {
                    idx += hi_idx[i] * self.strides[i];
                }
            }
            acc += sign * self.table[idx];
        }
        acc
    }
}
