use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{GridFunction, GridSpec};
use super::params::{RectParams, Stratum};
use crate::error::{Error, Result};

/// Candidate rectangles around `x`: one-sided extents `k · step` with
/// `0 ≤ k ≤ max_steps[i]` and positive total extent on every axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectSearch {
    pub step: f64,
    pub max_steps: Vec<usize>,
}

impl RectSearch {
    pub fn new(step: f64, max_steps: Vec<usize>) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter(format!("search step must be positive, got {step}")));
        }
        if max_steps.is_empty() || max_steps.len() > 2 {
            return Err(Error::InvalidDimension(max_steps.len()));
        }
        if max_steps.contains(&0) {
            return Err(Error::InvalidParameter("empty search grid".into()));
        }
        Ok(Self { step, max_steps })
    }

    pub fn uniform(dim: usize, step: f64, max_steps: usize) -> Result<Self> {
        Self::new(step, vec![max_steps; dim])
    }

    pub fn dim(&self) -> usize {
        self.max_steps.len()
    }

    /// Half the step over the same reach; every old candidate stays a candidate.
    pub fn refined(&self) -> Self {
        Self { step: self.step / 2.0, max_steps: self.max_steps.iter().map(|k| 2 * k).collect() }
    }

    /// All candidates in scan order.
    pub fn candidates(&self) -> Vec<RectParams> {
        let d = self.dim();
        let mut out = Vec::new();
        let k0 = self.max_steps[0];
        let k1 = if d == 2 { self.max_steps[1] } else { 0 };
        let s = self.step;
        for a in 0..=k0 {
            for b in 0..=k0 {
                if a + b == 0 {
                    continue;
                }
                if d == 1 {
                    out.push(RectParams { lower: vec![a as f64 * s], upper: vec![b as f64 * s] });
                    continue;
                }
                for c in 0..=k1 {
                    for e in 0..=k1 {
                        if c + e > 0 {
                            out.push(RectParams {
                                lower: vec![a as f64 * s, c as f64 * s],
                                upper: vec![b as f64 * s, e as f64 * s],
                            });
                        }
                    }
                }
            }
        }
        out
    }

    fn check_against(&self, grids: &[GridFunction]) -> Result<()> {
        let d = grids[0].dim();
        if self.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: self.dim() });
        }
        for g in grids {
            let ratio = self.step / g.spacing();
            if ratio < 1.0 - 1e-9 || (ratio - ratio.round()).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "search step {} is not a multiple of grid spacing {}",
                    self.step,
                    g.spacing()
                )));
            }
        }
        Ok(())
    }
}

/// `prod / ∏_i len_i^m`.
fn objective(prod: f64, lens: &[f64], m: usize) -> f64 {
    let mut v = 1.0;
    for l in lens {
        v *= l.powi(m as i32);
    }
    prod / v
}

/// Absolute values of the inputs, ready for rectangle integrals.
#[derive(Debug, Clone)]
pub struct ProductInputs {
    grids: Vec<GridFunction>,
}

impl ProductInputs {
    pub fn new(fs: &[GridFunction]) -> Result<Self> {
        let first = fs.first().ok_or(Error::EmptyFunctionList)?;
        let d = first.dim();
        if let Some(g) = fs.iter().find(|g| g.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: g.dim() });
        }
        Ok(Self { grids: fs.iter().map(GridFunction::abs).collect() })
    }

    pub fn dim(&self) -> usize {
        self.grids[0].dim()
    }

    pub fn m(&self) -> usize {
        self.grids.len()
    }

    pub fn grids(&self) -> &[GridFunction] {
        &self.grids
    }

    /// `∏_j ‖f_j‖₁`.
    pub fn l1_product(&self) -> f64 {
        self.grids.iter().map(GridFunction::l1_norm).product()
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(())
    }

    /// The rectangle objective at `x` with extents `r`, by stratum.
    pub fn u(&self, x: &[f64], r: &RectParams) -> Result<f64> {
        self.check_point(x)?;
        let r = RectParams::new(r.lower.clone(), r.upper.clone())?;
        if r.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: r.dim() });
        }
        let m = self.m();
        Ok(match r.stratum() {
            Stratum::Origin => self.grids.iter().map(|g| g.value_at(x)).product(),
            Stratum::Segment(axis) => {
                let (lo, hi) = (x[axis] - r.lower[axis], x[axis] + r.upper[axis]);
                let prod = self.grids.iter().map(|g| g.integral_segment(x, axis, lo, hi)).product();
                objective(prod, &[r.length(axis)], m)
            }
            Stratum::Full => {
                let d = self.dim();
                let lo: Vec<f64> = (0..d).map(|i| x[i] - r.lower[i]).collect();
                let hi: Vec<f64> = (0..d).map(|i| x[i] + r.upper[i]).collect();
                let prod = self.grids.iter().map(|g| g.integral_box(&lo, &hi)).product();
                let lens: Vec<f64> = (0..d).map(|i| r.length(i)).collect();
                objective(prod, &lens, m)
            }
        })
    }

    fn scan(&self, x: &[f64], search: &RectSearch, min_total: &[usize]) -> Result<Scan> {
        self.check_point(x)?;
        search.check_against(&self.grids)?;
        Scan::build(self, x, search, min_total)
    }

    /// Largest objective over the search grid and the first rectangle attaining it.
    pub fn strong_max(&self, x: &[f64], search: &RectSearch) -> Result<(f64, RectParams)> {
        let scan = self.scan(x, search, &vec![1; self.dim()])?;
        let (v, idx) = scan.best();
        Ok((v, scan.params(idx)))
    }

    /// Same search restricted to total extents `≥ eps[i]` per axis.
    pub fn truncated(&self, x: &[f64], eps: &[f64], search: &RectSearch) -> Result<f64> {
        if eps.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: eps.len() });
        }
        if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(Error::InvalidParameter(format!("truncation must be positive, got {eps:?}")));
        }
        let min_total: Vec<usize> = eps.iter().map(|e| ((e / search.step) - 1e-9).ceil().max(1.0) as usize).collect();
        Ok(self.scan(x, search, &min_total)?.best().0)
    }

    /// Candidates within relative tolerance `tau` of the maximum.
    pub fn near_maximizers(&self, x: &[f64], search: &RectSearch, tau: f64) -> Result<Vec<RectParams>> {
        if !(tau >= 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be nonnegative, got {tau}")));
        }
        let scan = self.scan(x, search, &vec![1; self.dim()])?;
        let (best, _) = scan.best();
        let threshold = best - tau * best.abs();
        let mut out = Vec::new();
        scan.for_each(|idx, v| {
            if v >= threshold {
                out.push(scan.params(idx));
            }
        });
        Ok(out)
    }

    /// The grid strong maximal function sampled at the centers of `spec`.
    pub fn field(&self, spec: &GridSpec, search: &RectSearch) -> Result<GridFunction> {
        let values = (0..spec.len())
            .into_par_iter()
            .map(|i| self.strong_max(&spec.center(i), search).map(|r| r.0))
            .collect::<Result<Vec<_>>>()?;
        GridFunction::new(spec.clone(), values)
    }
}

/// Primitive values on the lattice `x + k·step`, `|k_i| ≤ K_i`, one tensor per input.
struct Scan {
    dim: usize,
    m: usize,
    k: [usize; 2],
    step: f64,
    min_total: [usize; 2],
    tensors: Vec<Vec<f64>>,
}

impl Scan {
    fn build(inputs: &ProductInputs, x: &[f64], search: &RectSearch, min_total: &[usize]) -> Result<Self> {
        let dim = inputs.dim();
        let mut k = [0usize; 2];
        let mut mt = [1usize; 2];
        for i in 0..dim {
            k[i] = search.max_steps[i];
            mt[i] = min_total[i].max(1);
            if mt[i] > 2 * k[i] {
                return Err(Error::InvalidParameter("empty search grid".into()));
            }
        }
        let w0 = 2 * k[0] + 1;
        let w1 = 2 * k[1] + 1;
        let s = search.step;
        let coord = |i: usize, a: usize| x[i] + (a as i64 - k[i] as i64) as f64 * s;
        let tensors = inputs
            .grids
            .iter()
            .map(|g| {
                let mut t = Vec::with_capacity(w0 * w1);
                for a in 0..w0 {
                    if dim == 1 {
                        t.push(g.primitive(&[coord(0, a)]));
                    } else {
                        for b in 0..w1 {
                            t.push(g.primitive(&[coord(0, a), coord(1, b)]));
                        }
                    }
                }
                t
            })
            .collect();
        Ok(Self { dim, m: inputs.m(), k, step: s, min_total: mt, tensors })
    }

    fn params(&self, idx: [usize; 4]) -> RectParams {
        let s = self.step;
        if self.dim == 1 {
            RectParams { lower: vec![idx[0] as f64 * s], upper: vec![idx[1] as f64 * s] }
        } else {
            RectParams {
                lower: vec![idx[0] as f64 * s, idx[2] as f64 * s],
                upper: vec![idx[1] as f64 * s, idx[3] as f64 * s],
            }
        }
    }

    /// Visits `(k0⁻, k0⁺, k1⁻, k1⁺)` in lexicographic order.
    fn for_each(&self, mut visit: impl FnMut([usize; 4], f64)) {
        let s = self.step;
        let [k0, k1] = self.k;
        let w1 = 2 * k1 + 1;
        let mut col = vec![0.0; self.m * w1];
        for a in 0..=k0 {
            for b in 0..=k0 {
                if a + b < self.min_total[0] {
                    continue;
                }
                let len0 = a as f64 * s + b as f64 * s;
                let (lo, hi) = (k0 - a, k0 + b);
                if self.dim == 1 {
                    let prod: f64 = self.tensors.iter().map(|t| t[hi] - t[lo]).product();
                    visit([a, b, 0, 0], objective(prod, &[len0], self.m));
                    continue;
                }
                for (j, t) in self.tensors.iter().enumerate() {
                    for c in 0..w1 {
                        col[j * w1 + c] = t[hi * w1 + c] - t[lo * w1 + c];
                    }
                }
                for c in 0..=k1 {
                    for e in 0..=k1 {
                        if c + e < self.min_total[1] {
                            continue;
                        }
                        let len1 = c as f64 * s + e as f64 * s;
                        let mut prod = 1.0;
                        for j in 0..self.m {
                            let d = &col[j * w1..(j + 1) * w1];
                            prod *= d[k1 + e] - d[k1 - c];
                        }
                        visit([a, b, c, e], objective(prod, &[len0, len1], self.m));
                    }
                }
            }
        }
    }

    fn best(&self) -> (f64, [usize; 4]) {
        let mut best = (f64::NEG_INFINITY, [0usize; 4]);
        self.for_each(|idx, v| {
            if v > best.0 {
                best = (v, idx);
            }
        });
        best
    }
}

/// The rectangle objective for the inputs `fs`.
pub fn u_eval(x: &[f64], fs: &[GridFunction], r: &RectParams) -> Result<f64> {
    ProductInputs::new(fs)?.u(x, r)
}

pub fn cont_strong_max(x: &[f64], fs: &[GridFunction], search: &RectSearch) -> Result<(f64, RectParams)> {
    ProductInputs::new(fs)?.strong_max(x, search)
}

pub fn truncated_strong_max(x: &[f64], fs: &[GridFunction], eps: &[f64], search: &RectSearch) -> Result<f64> {
    ProductInputs::new(fs)?.truncated(x, eps, search)
}

/// Largest Euclidean distance between two extent vectors.
pub fn params_diameter(set: &[RectParams]) -> f64 {
    let pts: Vec<Vec<f64>> = set.iter().map(RectParams::as_vec).collect();
    let mut best = 0.0f64;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            let d2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
            best = best.max(d2.sqrt());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box2(h: f64, lo: [f64; 2], shape: [usize; 2], f: impl Fn(&[f64]) -> f64) -> GridFunction {
        GridFunction::from_fn(GridSpec::new(lo.to_vec(), h, shape.to_vec()).unwrap(), f).unwrap()
    }

    #[test]
    fn averages_of_one() {
        let one = box2(0.25, [-4.0, -4.0], [32, 32], |_| 1.0);
        let fs = [one.clone(), one];
        let r = RectParams::planar(0.5, 1.25, 0.75, 0.3).unwrap();
        assert!((u_eval(&[0.1, 0.2], &fs, &r).unwrap() - 1.0).abs() < 1e-12);
        let search = RectSearch::uniform(2, 0.25, 6).unwrap();
        let (v, _) = cont_strong_max(&[0.1, 0.2], &fs, &search).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn origin_branch_is_product_of_values() {
        let f = box2(0.5, [0.0, 0.0], [4, 4], |x| x[0] + 2.0 * x[1]);
        let g = box2(0.5, [0.0, 0.0], [4, 4], |x| -x[1]);
        let x = [0.75, 1.25];
        let u = u_eval(&x, &[f, g], &RectParams::zero(2)).unwrap();
        assert!((u - (0.75 + 2.5) * 1.25).abs() < 1e-14);
    }

    #[test]
    fn ridge_matches_one_dimensional_average() {
        // f independent of x2: segment branch along axis 0 equals the 1-D average
        let h = 0.1;
        let ridge = |t: f64| (-(t * t)).exp();
        let f = box2(h, [-3.0, -3.0], [60, 60], |x| ridge(x[0]));
        let r = RectParams::planar(0.3, 0.7, 0.0, 0.0).unwrap();
        let x = [0.05, 0.42];
        let u = u_eval(&x, &[f], &r).unwrap();
        // [-0.25, 0.75] covers half of the cells centered at -0.25 and 0.75
        let inner: f64 = (0..9).map(|i| ridge(-0.15 + i as f64 * h)).sum();
        let oracle = h * (inner + 0.5 * ridge(-0.25) + 0.5 * ridge(0.75));
        assert!((u - oracle).abs() < 1e-13, "{u} vs {oracle}");
    }

    #[test]
    fn thin_rectangles_reduce_to_segments() {
        let h = 0.1;
        let f = box2(h, [-2.0, -2.0], [40, 40], |x| (x[0] * x[1] + x[0]).cos());
        let x = [0.13, 0.05];
        let seg = u_eval(&x, std::slice::from_ref(&f), &RectParams::planar(0.4, 0.6, 0.0, 0.0).unwrap()).unwrap();
        let thin = u_eval(&x, &[f], &RectParams::planar(0.4, 0.6, 0.02, 0.01).unwrap()).unwrap();
        assert!((seg - thin).abs() < 1e-12);
    }

    #[test]
    fn search_equals_max_of_explicit_candidates() {
        let h = 0.2;
        let f = box2(h, [-2.0, -2.0], [20, 20], |x| (-(x[0] - 0.3).powi(2) - 2.0 * x[1] * x[1]).exp());
        let g = box2(h, [-2.0, -2.0], [20, 20], |x| 1.0 / (1.0 + x[0] * x[0] + (x[1] - 0.5).powi(2)));
        let fs = [f, g];
        let search = RectSearch::uniform(2, 0.4, 4).unwrap();
        let x = [0.1, -0.3];
        let (v, arg) = cont_strong_max(&x, &fs, &search).unwrap();
        let mut best = (f64::NEG_INFINITY, None);
        for r in search.candidates() {
            let u = u_eval(&x, &fs, &r).unwrap();
            if u > best.0 {
                best = (u, Some(r));
            }
        }
        assert_eq!(v, best.0);
        assert_eq!(Some(arg), best.1);
    }

    #[test]
    fn one_dimensional_search_equals_candidates() {
        let spec = GridSpec::new(vec![-3.0], 0.1, vec![60]).unwrap();
        let f = GridFunction::from_fn(spec, |x| (2.0 * x[0]).sin()).unwrap();
        let search = RectSearch::uniform(1, 0.2, 10).unwrap();
        let (v, _) = cont_strong_max(&[0.35], std::slice::from_ref(&f), &search).unwrap();
        let best = search.candidates().iter().map(|r| u_eval(&[0.35], std::slice::from_ref(&f), r).unwrap()).fold(f64::MIN, f64::max);
        assert_eq!(v, best);
    }

    #[test]
    fn refinement_never_decreases() {
        let spec = GridSpec::new(vec![-3.0, -3.0], 0.05, vec![120, 120]).unwrap();
        let f = GridFunction::from_fn(spec, |x| (-(x[0] * x[0] + x[1] * x[1])).exp()).unwrap();
        let x = [0.0, 0.0];
        let mut search = RectSearch::uniform(2, 0.4, 3).unwrap();
        let mut prev = 0.0;
        for _ in 0..3 {
            let (v, _) = cont_strong_max(&x, std::slice::from_ref(&f), &search).unwrap();
            assert!(v >= prev && v <= 1.0);
            prev = v;
            search = search.refined();
        }
    }

    #[test]
    fn truncation() {
        let spec = GridSpec::new(vec![-3.0, -3.0], 0.1, vec![60, 60]).unwrap();
        let f = GridFunction::from_fn(spec.clone(), |x| (-(x[0] * x[0] + x[1] * x[1])).exp()).unwrap();
        let search = RectSearch::uniform(2, 0.1, 10).unwrap();
        let x = [0.5, -0.2];
        let full = cont_strong_max(&x, std::slice::from_ref(&f), &search).unwrap().0;
        assert_eq!(truncated_strong_max(&x, std::slice::from_ref(&f), &[1e-9, 1e-9], &search).unwrap(), full);
        let t = truncated_strong_max(&x, std::slice::from_ref(&f), &[0.5, 0.5], &search).unwrap();
        assert!(t <= full);
        let zero = GridFunction::new(spec, vec![0.0; 3600]).unwrap();
        assert_eq!(truncated_strong_max(&x, &[f, zero], &[0.5, 0.5], &search).unwrap(), 0.0);
        let tiny = RectSearch::uniform(2, 0.1, 1).unwrap();
        let g = GridFunction::from_fn(GridSpec::new(vec![0.0, 0.0], 0.1, vec![2, 2]).unwrap(), |_| 1.0).unwrap();
        assert!(truncated_strong_max(&x, &[g], &[0.5, 0.5], &tiny).is_err());
    }

    #[test]
    fn misaligned_step_is_rejected() {
        let f = box2(0.1, [0.0, 0.0], [4, 4], |_| 1.0);
        let search = RectSearch::uniform(2, 0.15, 3).unwrap();
        assert!(cont_strong_max(&[0.2, 0.2], &[f], &search).is_err());
        assert!(RectSearch::uniform(2, 0.1, 0).is_err());
    }

    #[test]
    fn lattice_corners_match_engine() {
        // h = 1 puts lattice point n on the cell [n, n + 1). At an integer
        // corner x, integer extents give exactly the lattice boxes that meet
        // one of the 2^d cells touching x, so the grid value is the largest
        // lattice value over those cells.
        use crate::engine::strong_max_point;
        use crate::lattice::LatticeFunction;
        let f = LatticeFunction::new(vec![-1, 0], vec![3, 2], vec![1.0, 0.0, 2.0, 0.5, 3.0, 0.0]).unwrap();
        let g = LatticeFunction::new(vec![0, -1], vec![2, 3], vec![0.0, 1.0, 1.0, 2.0, 0.0, 4.0]).unwrap();
        let to_grid = |l: &LatticeFunction| {
            let spec = GridSpec::new(l.origin().iter().map(|o| *o as f64).collect(), 1.0, l.shape().to_vec()).unwrap();
            GridFunction::new(spec, l.values().to_vec()).unwrap()
        };
        let search = RectSearch::uniform(2, 1.0, 8).unwrap();
        for (lat, grids) in [(vec![f.clone()], vec![to_grid(&f)]), (vec![f.clone(), g.clone()], vec![to_grid(&f), to_grid(&g)])] {
            for a in -3..=4i64 {
                for b in -3..=4i64 {
                    let (v, _) = cont_strong_max(&[a as f64, b as f64], &grids, &search).unwrap();
                    let mut best = 0.0f64;
                    for c in [[a - 1, b - 1], [a - 1, b], [a, b - 1], [a, b]] {
                        best = best.max(strong_max_point(&lat, &c).unwrap().0);
                    }
                    assert!((v - best).abs() < 1e-12, "({a},{b}): {v} vs {best}");
                }
            }
        }
    }

    #[test]
    fn near_maximizers_contain_argmax() {
        let spec = GridSpec::new(vec![-3.0, -3.0], 0.1, vec![60, 60]).unwrap();
        let f = GridFunction::from_fn(spec, |x| (-(x[0] * x[0] + 3.0 * x[1] * x[1])).exp()).unwrap();
        let search = RectSearch::uniform(2, 0.1, 12).unwrap();
        let inputs = ProductInputs::new(&[f]).unwrap();
        let x = [1.0, 0.4];
        let (_, arg) = inputs.strong_max(&x, &search).unwrap();
        let near = inputs.near_maximizers(&x, &search, 1e-6).unwrap();
        assert!(near.contains(&arg));
        assert!(params_diameter(&near) < 0.3);
        let all = inputs.near_maximizers(&x, &search, 1.0).unwrap();
        assert_eq!(all.len(), search.candidates().len());
    }
}
