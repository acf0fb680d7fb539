//! Exact evaluation of the discrete multilinear strong maximal operator
//!
//! `𝕄(f⃗)(n) = sup_{[a,b] ∋ n} N([a,b])^{-m} ∏_j Σ_{k∈[a,b]} |f_j(k)|`
//!
//! over integer boxes, together with a rasterized ball maximal operator and
//! the one-dimensional lattice counting functions.
//!
//! Only boxes inside the window `a_i ∈ [min(lo_i, n_i), n_i]`,
//! `b_i ∈ [n_i, max(hi_i, n_i)]` need to be examined, where `[lo, hi]` is the
//! union support hull: pushing a side past the hull keeps every sum fixed and
//! strictly grows `N`. The search prunes further to the boxes that can carry a
//! positive objective.

mod ball;
mod counting;
mod farfield;

pub use ball::hl_ball_max_point;
pub use counting::{lattice_count_floor_f, lattice_count_g, rectangle_lattice_count};
pub use farfield::{gradient_l1_exact, gradient_l1_partial};

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{IntegerBox, LatticeFunction, PrefixSumTable};

pub(crate) fn validate_inputs(fs: &[LatticeFunction]) -> Result<usize> {
    let first = fs.first().ok_or(Error::EmptyFunctionList)?;
    let d = first.dim();
    if let Some(f) = fs.iter().find(|f| f.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: f.dim(),
        });
    }
    Ok(d)
}

/// Union of the support hulls, `None` when any input vanishes identically
/// (then the operator is identically zero).
pub(crate) fn union_support(fs: &[LatticeFunction]) -> Option<IntegerBox> {
    let mut out: Option<IntegerBox> = None;
    for f in fs {
        let h = f.support_hull()?;
        out = Some(match out {
            None => h,
            Some(b) => b.hull_with(&h),
        });
    }
    out
}

/// `∏ sums / count^m`, the single place the objective is formed.
#[inline]
pub(crate) fn objective_from_sums(prod: f64, count: u64, m: usize) -> f64 {
    prod / (count as f64).powi(m as i32)
}

/// Precomputed prefix tables for a fixed input vector `f⃗`.
#[derive(Debug, Clone)]
pub struct StrongMaxEngine {
    dim: usize,
    tables: Vec<PrefixSumTable>,
    support: Option<IntegerBox>,
}

/// Candidate sides for one axis: `a ∈ [a_lo, a_hi]`, `b ∈ [b_lo, b_hi]`.
#[derive(Debug, Clone, Copy)]
struct AxisRange {
    a_lo: i64,
    a_hi: i64,
    b_lo: i64,
    b_hi: i64,
}

impl StrongMaxEngine {
    pub fn new(fs: &[LatticeFunction]) -> Result<Self> {
        let dim = validate_inputs(fs)?;
        Ok(Self {
            dim,
            tables: fs.iter().map(PrefixSumTable::new).collect(),
            support: union_support(fs),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.tables.len()
    }

    pub fn support(&self) -> Option<&IntegerBox> {
        self.support.as_ref()
    }

    pub(crate) fn tables(&self) -> &[PrefixSumTable] {
        &self.tables
    }

    fn check_point(&self, n: &[i64]) -> Result<()> {
        if n.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: n.len(),
            });
        }
        Ok(())
    }

    /// Objective of the box `[lo, hi]`.
    pub fn objective_bounds(&self, lo: &[i64], hi: &[i64]) -> f64 {
        let mut prod = 1.0;
        for t in &self.tables {
            let s = t.box_sum_bounds(lo, hi);
            if s == 0.0 {
                return 0.0;
            }
            prod *= s;
        }
        let count: u64 = lo.iter().zip(hi).map(|(a, b)| (b - a + 1) as u64).product();
        objective_from_sums(prod, count, self.m())
    }

    pub fn objective(&self, b: &IntegerBox) -> f64 {
        self.objective_bounds(b.lo(), b.hi())
    }

    fn pruned_ranges(&self, support: &IntegerBox, n: &[i64]) -> [AxisRange; 3] {
        let mut r = [AxisRange { a_lo: 0, a_hi: 0, b_lo: 0, b_hi: 0 }; 3];
        for i in 0..self.dim {
            let (lo, hi, x) = (support.lo()[i], support.hi()[i], n[i]);
            r[i] = if x > hi {
                AxisRange { a_lo: lo, a_hi: hi, b_lo: x, b_hi: x }
            } else if x < lo {
                AxisRange { a_lo: x, a_hi: x, b_lo: lo, b_hi: hi }
            } else {
                AxisRange { a_lo: lo, a_hi: x, b_lo: x, b_hi: hi }
            };
        }
        r
    }

    fn window_ranges(&self, n: &[i64]) -> [AxisRange; 3] {
        let mut r = [AxisRange { a_lo: 0, a_hi: 0, b_lo: 0, b_hi: 0 }; 3];
        for i in 0..self.dim {
            let x = n[i];
            r[i] = match &self.support {
                Some(s) => AxisRange {
                    a_lo: s.lo()[i].min(x),
                    a_hi: x,
                    b_lo: x,
                    b_hi: s.hi()[i].max(x),
                },
                None => AxisRange { a_lo: x, a_hi: x, b_lo: x, b_hi: x },
            };
        }
        r
    }

    /// Visits boxes in lexicographic order of `(a_1..a_d, b_1..b_d)`.
    fn for_each_box(&self, ranges: &[AxisRange; 3], mut visit: impl FnMut(&[i64], &[i64])) {
        let d = self.dim;
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        let mut coord = [0i64; 6];
        let bounds = |k: usize| -> (i64, i64) {
            if k < d {
                (ranges[k].a_lo, ranges[k].a_hi)
            } else {
                (ranges[k - d].b_lo, ranges[k - d].b_hi)
            }
        };
        for (k, c) in coord.iter_mut().enumerate().take(2 * d) {
            *c = bounds(k).0;
        }
        loop {
            lo[..d].copy_from_slice(&coord[..d]);
            hi[..d].copy_from_slice(&coord[d..2 * d]);
            visit(&lo[..d], &hi[..d]);
            let mut k = 2 * d;
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                let (start, end) = bounds(k);
                if coord[k] < end {
                    coord[k] += 1;
                    break;
                }
                coord[k] = start;
            }
        }
    }

    /// Value and the lexicographically smallest attaining box.
    ///
    /// With every input nonzero the whole-hull box already gives a positive
    /// value, so the supremum is 0 only when some input vanishes; the reported
    /// box is then `[n, n]`.
    pub fn point(&self, n: &[i64]) -> Result<(f64, IntegerBox)> {
        self.check_point(n)?;
        let Some(support) = &self.support else {
            return Ok((0.0, IntegerBox::point(n)?));
        };
        let ranges = self.pruned_ranges(support, n);
        let mut best = 0.0f64;
        let mut arg: Option<(Vec<i64>, Vec<i64>)> = None;
        self.for_each_box(&ranges, |lo, hi| {
            let v = self.objective_bounds(lo, hi);
            if v > best {
                best = v;
                arg = Some((lo.to_vec(), hi.to_vec()));
            }
        });
        let b = match arg {
            Some((lo, hi)) => IntegerBox::new(lo, hi)?,
            // only reachable if every objective underflows to 0
            None => IntegerBox::point(n)?,
        };
        Ok((best, b))
    }

    pub fn value(&self, n: &[i64]) -> Result<f64> {
        Ok(self.point(n)?.0)
    }

    /// Evaluates every point of `query` in parallel.
    pub fn field(&self, query: &IntegerBox) -> Result<MaximalField> {
        if query.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: query.dim(),
            });
        }
        let results: Vec<(f64, IntegerBox)> = (0..query.count() as usize)
            .into_par_iter()
            .map(|i| self.point(&query.point_at(i)))
            .collect::<Result<_>>()?;
        let (values, argmax): (Vec<f64>, Vec<IntegerBox>) = results.into_iter().unzip();
        Ok(MaximalField {
            values: LatticeFunction::new(query.lo().to_vec(), query.extents(), values)?,
            argmax,
            m: self.m(),
        })
    }

    /// Every box of the window with objective `≥ (1 - τ)·sup`, in lexicographic order.
    pub fn near_maximizers(&self, n: &[i64], tau: f64) -> Result<Vec<IntegerBox>> {
        if !(tau >= 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be >= 0, got {tau}")));
        }
        let (sup, _) = self.point(n)?;
        let threshold = (1.0 - tau) * sup;
        let ranges = self.window_ranges(n);
        let mut out = Vec::new();
        let mut err = None;
        self.for_each_box(&ranges, |lo, hi| {
            if self.objective_bounds(lo, hi) >= threshold {
                match IntegerBox::new(lo.to_vec(), hi.to_vec()) {
                    Ok(b) => out.push(b),
                    Err(e) => err = Some(e),
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }
}

/// Values of `𝕄(f⃗)` over a query box with an attaining box per point.
#[derive(Debug, Clone)]
pub struct MaximalField {
    pub values: LatticeFunction,
    /// Attaining boxes in row-major order of the query box.
    pub argmax: Vec<IntegerBox>,
    pub m: usize,
}

impl MaximalField {
    pub fn query(&self) -> &IntegerBox {
        self.values.hull()
    }

    pub fn argmax_at(&self, n: &[i64]) -> Option<&IntegerBox> {
        let q = self.query();
        q.contains(n).then(|| &self.argmax[q.linear_index(n)])
    }

    /// Rows `n_1,…,n_d,a_1,…,a_d,b_1,…,b_d,value`, no header.
    pub fn write_argmax_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        for (i, b) in self.argmax.iter().enumerate() {
            let n = self.query().point_at(i);
            let mut row: Vec<String> = n.iter().map(i64::to_string).collect();
            row.extend(b.lo().iter().map(i64::to_string));
            row.extend(b.hi().iter().map(i64::to_string));
            row.push(self.values.values()[i].to_string());
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn strong_max_point(fs: &[LatticeFunction], n: &[i64]) -> Result<(f64, IntegerBox)> {
    StrongMaxEngine::new(fs)?.point(n)
}

pub fn strong_max_field(fs: &[LatticeFunction], query: &IntegerBox) -> Result<MaximalField> {
    StrongMaxEngine::new(fs)?.field(query)
}

pub fn near_maximizers(fs: &[LatticeFunction], n: &[i64], tau: f64) -> Result<Vec<IntegerBox>> {
    StrongMaxEngine::new(fs)?.near_maximizers(n, tau)
}

/// Reference evaluation: every box inside the support hull grown by `margin`
/// (and containing `n`), with sums formed by direct iteration.
pub fn naive_strong_max_point(fs: &[LatticeFunction], n: &[i64], margin: i64) -> Result<f64> {
    let d = validate_inputs(fs)?;
    if n.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: n.len() });
    }
    if margin < 0 {
        return Err(Error::InvalidParameter(format!("margin must be >= 0, got {margin}")));
    }
    let window = match union_support(fs) {
        Some(h) => h.hull_with_point(n).expanded(margin),
        None => IntegerBox::point(n)?.expanded(margin),
    };
    let a_box = IntegerBox::new(window.lo().to_vec(), n.to_vec())?;
    let b_box = IntegerBox::new(n.to_vec(), window.hi().to_vec())?;
    let m = fs.len();
    let mut best = 0.0f64;
    for a in a_box.points() {
        for b in b_box.points() {
            let bx = IntegerBox::new(a.clone(), b)?;
            let mut prod = 1.0;
            for f in fs {
                let mut s = 0.0;
                for p in bx.points() {
                    s += f.get(&p).abs();
                }
                prod *= s;
            }
            best = best.max(objective_from_sums(prod, bx.count(), m));
        }
    }
    Ok(best)
}
