use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::KahanSum;

/// Uniform cells `[origin + k h, origin + (k+1) h)` per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Vec<f64>,
    pub spacing: f64,
    pub shape: Vec<usize>,
}

impl GridSpec {
    pub fn new(origin: Vec<f64>, spacing: f64, shape: Vec<usize>) -> Result<Self> {
        let d = origin.len();
        if !(1..=2).contains(&d) {
            return Err(Error::InvalidDimension(d));
        }
        if shape.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: shape.len() });
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidParameter(format!("spacing must be positive, got {spacing}")));
        }
        if shape.contains(&0) || origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidShape(format!("origin {origin:?}, shape {shape:?}")));
        }
        Ok(Self { origin, spacing, shape })
    }

    /// Smallest grid with spacing `h` and origin `lo` covering `[lo, hi]`.
    pub fn covering(lo: &[f64], hi: &[f64], h: f64) -> Result<Self> {
        let shape = lo
            .iter()
            .zip(hi)
            .map(|(a, b)| (((b - a) / h) - 1e-9).ceil().max(1.0) as usize)
            .collect();
        Self::new(lo.to_vec(), h, shape)
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major multi-index of a flat index (last axis fastest).
    pub fn index(&self, mut flat: usize) -> [usize; 2] {
        let mut out = [0usize; 2];
        for i in (0..self.dim()).rev() {
            out[i] = flat % self.shape[i];
            flat /= self.shape[i];
        }
        out
    }

    pub fn center(&self, flat: usize) -> Vec<f64> {
        let k = self.index(flat);
        (0..self.dim()).map(|i| self.origin[i] + (k[i] as f64 + 0.5) * self.spacing).collect()
    }

    /// Grown by `cells` on every side.
    pub fn expanded(&self, cells: usize) -> Self {
        Self {
            origin: self.origin.iter().map(|o| o - cells as f64 * self.spacing).collect(),
            spacing: self.spacing,
            shape: self.shape.iter().map(|s| s + 2 * cells).collect(),
        }
    }

    pub fn upper(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.origin[i] + self.shape[i] as f64 * self.spacing).collect()
    }
}

/// Samples of a function on ℝ^d (`d ≤ 2`), one value per cell, zero outside.
///
/// Integrals treat the samples as piecewise constant over cells, which makes
/// box integrals exact midpoint sums. Point values interpolate multilinearly
/// between cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    samples: Vec<f64>,
    cumulative: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GridDoc {
    dim: usize,
    origin: Vec<f64>,
    spacing: f64,
    shape: Vec<usize>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != spec.len() {
            return Err(Error::InvalidShape(format!(
                "{} samples for shape {:?}",
                samples.len(),
                spec.shape
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let cumulative = build_cumulative(&spec, &samples);
        Ok(Self { spec, samples, cumulative })
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let samples = (0..spec.len()).map(|i| f(&spec.center(i))).collect();
        Self::new(spec, samples)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn spacing(&self) -> f64 {
        self.spec.spacing
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GridDoc {
            dim: self.dim(),
            origin: self.spec.origin.clone(),
            spacing: self.spec.spacing,
            shape: self.spec.shape.clone(),
            values: self.samples.clone(),
        })
        .expect("finite values serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: GridDoc = serde_json::from_str(s)?;
        if doc.origin.len() != doc.dim {
            return Err(Error::DimensionMismatch { expected: doc.dim, found: doc.origin.len() });
        }
        Self::new(GridSpec::new(doc.origin, doc.spacing, doc.shape)?, doc.values)
    }

    fn sample(&self, k: [i64; 2]) -> f64 {
        let d = self.dim();
        let mut flat = 0usize;
        for i in 0..d {
            if k[i] < 0 || k[i] >= self.spec.shape[i] as i64 {
                return 0.0;
            }
            flat = flat * self.spec.shape[i] + k[i] as usize;
        }
        self.samples[flat]
    }

    /// Multilinear interpolation between cell centers, zero beyond the outer
    /// ring of centers.
    pub fn value_at(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        let h = self.spec.spacing;
        let mut base = [0i64; 2];
        let mut frac = [0.0f64; 2];
        for i in 0..d {
            let u = (x[i] - self.spec.origin[i]) / h - 0.5;
            let f = u.floor();
            base[i] = f as i64;
            frac[i] = u - f;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << d) {
            let mut k = base;
            let mut w = 1.0;
            for i in 0..d {
                if corner >> i & 1 == 1 {
                    k[i] += 1;
                    w *= frac[i];
                } else {
                    w *= 1.0 - frac[i];
                }
            }
            if w != 0.0 {
                acc += w * self.sample(k);
            }
        }
        acc
    }

    /// `P(y) = ∫_{origin}^{y} f`, exact for the piecewise-constant reading.
    pub fn primitive(&self, y: &[f64]) -> f64 {
        let d = self.dim();
        let h = self.spec.spacing;
        let mut base = [0usize; 2];
        let mut frac = [0.0f64; 2];
        for i in 0..d {
            let n = self.spec.shape[i];
            let u = ((y[i] - self.spec.origin[i]) / h).clamp(0.0, n as f64);
            let k = (u.floor() as usize).min(n - 1);
            base[i] = k;
            frac[i] = u - k as f64;
        }
        let stride1 = if d == 2 { self.spec.shape[1] + 1 } else { 1 };
        let at = |a: usize, b: usize| -> f64 {
            if d == 1 {
                self.cumulative[a]
            } else {
                self.cumulative[a * stride1 + b]
            }
        };
        if d == 1 {
            let (a, t) = (base[0], frac[0]);
            at(a, 0) * (1.0 - t) + at(a + 1, 0) * t
        } else {
            let (a, b) = (base[0], base[1]);
            let (s, t) = (frac[0], frac[1]);
            (at(a, b) * (1.0 - t) + at(a, b + 1) * t) * (1.0 - s)
                + (at(a + 1, b) * (1.0 - t) + at(a + 1, b + 1) * t) * s
        }
    }

    /// `∫_{[lo, hi]} f`.
    pub fn integral_box(&self, lo: &[f64], hi: &[f64]) -> f64 {
        match self.dim() {
            1 => self.primitive(&[hi[0]]) - self.primitive(&[lo[0]]),
            _ => {
                (self.primitive(&[hi[0], hi[1]]) - self.primitive(&[lo[0], hi[1]]))
                    - (self.primitive(&[hi[0], lo[1]]) - self.primitive(&[lo[0], lo[1]]))
            }
        }
    }

    /// `∫_{lo}^{hi} f(y) dy_axis` along the line through `x` parallel to
    /// `axis`, using the row of cells that contains `x` transversally.
    pub fn integral_segment(&self, x: &[f64], axis: usize, lo: f64, hi: f64) -> f64 {
        if self.dim() == 1 {
            return self.integral_box(&[lo], &[hi]);
        }
        let o = 1 - axis;
        let h = self.spec.spacing;
        let row = ((x[o] - self.spec.origin[o]) / h).floor();
        if row < 0.0 || row >= self.spec.shape[o] as f64 {
            return 0.0;
        }
        let mut a = [0.0; 2];
        let mut b = [0.0; 2];
        a[axis] = lo;
        b[axis] = hi;
        a[o] = self.spec.origin[o] + row * h;
        b[o] = a[o] + h;
        self.integral_box(&a, &b) / h
    }

    /// `(∫ |f|^p)^{1/p}`, or `sup |f|` for `p = ∞`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        crate::lattice::check_exponent(p)?;
        let cell = self.spec.spacing.powi(self.dim() as i32);
        Ok(if p.is_infinite() {
            self.samples.iter().fold(0.0, |a, v| a.max(v.abs()))
        } else {
            (self.samples.iter().map(|v| v.abs().powf(p)).collect::<KahanSum>().value() * cell).powf(1.0 / p)
        })
    }

    pub fn l1_norm(&self) -> f64 {
        self.samples.iter().map(|v| v.abs()).collect::<KahanSum>().value() * self.spec.spacing.powi(self.dim() as i32)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(self.spec.clone(), self.samples.iter().map(|v| f(*v)).collect()).expect("same shape")
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    /// Same samples with the origin moved by `offset`: `g(x) = f(x - offset)`.
    pub fn translated(&self, offset: &[f64]) -> Self {
        let mut spec = self.spec.clone();
        for (o, t) in spec.origin.iter_mut().zip(offset) {
            *o += t;
        }
        Self::new(spec, self.samples.clone()).expect("same shape")
    }

    /// `g(x) = f(λ x)`: same samples on a grid scaled by `1/λ`.
    pub fn dilated(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("dilation must be positive, got {lambda}")));
        }
        let spec = GridSpec::new(
            self.spec.origin.iter().map(|o| o / lambda).collect(),
            self.spec.spacing / lambda,
            self.spec.shape.clone(),
        )?;
        Self::new(spec, self.samples.clone())
    }

    /// Cell offsets between two grids with the same spacing and aligned cells.
    fn cell_offset(&self, other: &GridFunction) -> Result<Vec<i64>> {
        let h = self.spec.spacing;
        if self.dim() != other.dim() || (other.spec.spacing - h).abs() > 1e-12 * h {
            return Err(Error::InvalidParameter("grids differ in dimension or spacing".into()));
        }
        (0..self.dim())
            .map(|i| {
                let k = (other.spec.origin[i] - self.spec.origin[i]) / h;
                if (k - k.round()).abs() > 1e-9 {
                    Err(Error::InvalidParameter("grid cells are not aligned".into()))
                } else {
                    Ok(k.round() as i64)
                }
            })
            .collect()
    }

    /// `self + c·other` on the smallest grid containing both.
    pub fn axpy(&self, c: f64, other: &GridFunction) -> Result<Self> {
        let off = self.cell_offset(other)?;
        let d = self.dim();
        let h = self.spec.spacing;
        let mut lo = vec![0i64; d];
        let mut shape = vec![0usize; d];
        for i in 0..d {
            lo[i] = off[i].min(0);
            let hi = (self.spec.shape[i] as i64).max(off[i] + other.spec.shape[i] as i64);
            shape[i] = (hi - lo[i]) as usize;
        }
        let spec = GridSpec::new((0..d).map(|i| self.spec.origin[i] + lo[i] as f64 * h).collect(), h, shape)?;
        let samples = (0..spec.len())
            .map(|flat| {
                let k = spec.index(flat);
                let mut a = [0i64; 2];
                let mut b = [0i64; 2];
                for i in 0..d {
                    a[i] = k[i] as i64 + lo[i];
                    b[i] = a[i] - off[i];
                }
                self.sample(a) + c * other.sample(b)
            })
            .collect();
        Self::new(spec, samples)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.axpy(-1.0, other)
    }
}

/// Corner table `C[k] = ∫_{[origin, origin + k h]} f`, compensated per axis.
fn build_cumulative(spec: &GridSpec, samples: &[f64]) -> Vec<f64> {
    let d = spec.dim();
    let cell = spec.spacing.powi(d as i32);
    if d == 1 {
        let mut out = Vec::with_capacity(samples.len() + 1);
        let mut acc = KahanSum::new();
        out.push(0.0);
        for v in samples {
            acc.add(v * cell);
            out.push(acc.value());
        }
        return out;
    }
    let (n0, n1) = (spec.shape[0], spec.shape[1]);
    let w = n1 + 1;
    let mut t = vec![0.0; (n0 + 1) * w];
    for a in 0..n0 {
        let mut acc = KahanSum::new();
        for b in 0..n1 {
            acc.add(samples[a * n1 + b] * cell);
            t[(a + 1) * w + b + 1] = acc.value();
        }
    }
    for b in 1..=n1 {
        let mut acc = KahanSum::new();
        for a in 1..=n0 {
            acc.add(t[a * w + b]);
            t[a * w + b] = acc.value();
        }
    }
    t
}
