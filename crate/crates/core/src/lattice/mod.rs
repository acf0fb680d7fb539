//! Finitely supported functions on ℤ^d, integer boxes, discrete calculus and
//! prefix-sum box queries.

mod calculus;
mod io;
mod prefix;

pub use calculus::{
    discrete_partial, gradient_lp_norm, lp_norm, sobolev_norm, total_variation,
    total_variation_euclidean,
};
pub(crate) use calculus::check_exponent;
pub use io::LatticeFunctionDoc;
pub use prefix::PrefixSumTable;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::InvalidDimension(dim))
    }
}

/// Axis-parallel integer box `[lo, hi]`, both corners included.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntegerBox {
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl IntegerBox {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        check_dim(lo.len())?;
        if let Some(axis) = (0..lo.len()).find(|&i| lo[i] > hi[i]) {
            return Err(Error::EmptyBox { axis });
        }
        Ok(Self { lo, hi })
    }

    pub fn point(n: &[i64]) -> Result<Self> {
        Self::new(n.to_vec(), n.to_vec())
    }

    /// The cube `[-r, r]^d`.
    pub fn centered_cube(dim: usize, r: i64) -> Result<Self> {
        Self::new(vec![-r; dim], vec![r; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn extent(&self, axis: usize) -> usize {
        (self.hi[axis] - self.lo[axis] + 1) as usize
    }

    pub fn extents(&self) -> Vec<usize> {
        (0..self.dim()).map(|i| self.extent(i)).collect()
    }

    /// Number of lattice points, N(R) for any rectangle whose trace is this box.
    pub fn count(&self) -> u64 {
        self.extents().iter().map(|&e| e as u64).product()
    }

    pub fn contains(&self, n: &[i64]) -> bool {
        n.len() == self.dim() && n.iter().enumerate().all(|(i, &v)| self.lo[i] <= v && v <= self.hi[i])
    }

    pub fn contains_box(&self, other: &IntegerBox) -> bool {
        self.contains(&other.lo) && self.contains(&other.hi)
    }

    pub fn intersect(&self, other: &IntegerBox) -> Option<IntegerBox> {
        let lo: Vec<i64> = self.lo.iter().zip(&other.lo).map(|(a, b)| *a.max(b)).collect();
        let hi: Vec<i64> = self.hi.iter().zip(&other.hi).map(|(a, b)| *a.min(b)).collect();
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            None
        } else {
            Some(IntegerBox { lo, hi })
        }
    }

    /// Smallest box containing both.
    pub fn hull_with(&self, other: &IntegerBox) -> IntegerBox {
        IntegerBox {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| *a.min(b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| *a.max(b)).collect(),
        }
    }

    pub fn hull_with_point(&self, n: &[i64]) -> IntegerBox {
        IntegerBox {
            lo: self.lo.iter().zip(n).map(|(a, b)| *a.min(b)).collect(),
            hi: self.hi.iter().zip(n).map(|(a, b)| *a.max(b)).collect(),
        }
    }

    pub fn expanded(&self, margin: i64) -> IntegerBox {
        IntegerBox {
            lo: self.lo.iter().map(|v| v - margin).collect(),
            hi: self.hi.iter().map(|v| v + margin).collect(),
        }
    }

    pub fn translated(&self, offset: &[i64]) -> IntegerBox {
        IntegerBox {
            lo: self.lo.iter().zip(offset).map(|(a, o)| a + o).collect(),
            hi: self.hi.iter().zip(offset).map(|(a, o)| a + o).collect(),
        }
    }

    /// Row-major linear index of `n` (last axis fastest). `n` must lie in the box.
    pub fn linear_index(&self, n: &[i64]) -> usize {
        let mut idx = 0usize;
        for i in 0..self.dim() {
            idx = idx * self.extent(i) + (n[i] - self.lo[i]) as usize;
        }
        idx
    }

    pub fn point_at(&self, mut idx: usize) -> Vec<i64> {
        let mut p = vec![0i64; self.dim()];
        for i in (0..self.dim()).rev() {
            let e = self.extent(i);
            p[i] = self.lo[i] + (idx % e) as i64;
            idx /= e;
        }
        p
    }

    /// Points in row-major order.
    pub fn points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.count() as usize).map(move |i| self.point_at(i))
    }
}

impl std::fmt::Display for IntegerBox {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

/// Real function on ℤ^d stored densely over its hull, zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFunction {
    hull: IntegerBox,
    values: Vec<f64>,
}

impl LatticeFunction {
    pub fn new(origin: Vec<i64>, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        check_dim(origin.len())?;
        if shape.len() != origin.len() {
            return Err(Error::DimensionMismatch {
                expected: origin.len(),
                found: shape.len(),
            });
        }
        if shape.contains(&0) {
            return Err(Error::InvalidShape(format!("zero extent in {shape:?}")));
        }
        let expected: usize = shape.iter().product();
        if values.len() != expected {
            return Err(Error::InvalidShape(format!(
                "{} values for shape {shape:?} (expected {expected})",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let hi = origin.iter().zip(&shape).map(|(o, s)| o + *s as i64 - 1).collect();
        Ok(Self {
            hull: IntegerBox { lo: origin, hi },
            values,
        })
    }

    pub fn zeros(hull: &IntegerBox) -> Self {
        Self {
            hull: hull.clone(),
            values: vec![0.0; hull.count() as usize],
        }
    }

    pub fn from_fn(hull: &IntegerBox, mut f: impl FnMut(&[i64]) -> f64) -> Result<Self> {
        let values: Vec<f64> = hull.points().map(|p| f(&p)).collect();
        Self::new(hull.lo.clone(), hull.extents(), values)
    }

    /// Unit spike at `at`.
    pub fn delta(at: &[i64]) -> Result<Self> {
        Self::new(at.to_vec(), vec![1; at.len()], vec![1.0])
    }

    /// Indicator of an integer box.
    pub fn indicator(b: &IntegerBox) -> Self {
        Self {
            hull: b.clone(),
            values: vec![1.0; b.count() as usize],
        }
    }

    pub fn from_slice_1d(origin: i64, values: &[f64]) -> Result<Self> {
        Self::new(vec![origin], vec![values.len()], values.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.hull.dim()
    }

    pub fn origin(&self) -> &[i64] {
        &self.hull.lo
    }

    pub fn shape(&self) -> Vec<usize> {
        self.hull.extents()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Storage hull (not necessarily tight).
    pub fn hull(&self) -> &IntegerBox {
        &self.hull
    }

    pub fn get(&self, n: &[i64]) -> f64 {
        if self.hull.contains(n) {
            self.values[self.hull.linear_index(n)]
        } else {
            0.0
        }
    }

    /// Smallest box containing every nonzero value, `None` for the zero function.
    pub fn support_hull(&self) -> Option<IntegerBox> {
        let mut out: Option<IntegerBox> = None;
        for (i, v) in self.values.iter().enumerate() {
            if *v != 0.0 {
                let p = self.hull.point_at(i);
                out = Some(match out {
                    None => IntegerBox { lo: p.clone(), hi: p },
                    Some(b) => b.hull_with_point(&p),
                });
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<i64>, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, v)| (self.hull.point_at(i), *v))
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            hull: self.hull.clone(),
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// Same values over a larger hull.
    pub fn restricted_or_extended(&self, hull: &IntegerBox) -> Self {
        let mut out = Self::zeros(hull);
        for (i, p) in hull.points().enumerate() {
            out.values[i] = self.get(&p);
        }
        out
    }

    /// `self + c * other` over the union hull.
    pub fn axpy(&self, c: f64, other: &LatticeFunction) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let hull = self.hull.hull_with(&other.hull);
        Self::from_fn(&hull, |p| self.get(p) + c * other.get(p))
    }

    pub fn sub(&self, other: &LatticeFunction) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    /// `g(n) = f(n - offset)`.
    pub fn translated(&self, offset: &[i64]) -> Self {
        Self {
            hull: self.hull.translated(offset),
            values: self.values.clone(),
        }
    }

    /// `g(n) = f(m)` with `n[i] = m[perm[i]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let d = self.dim();
        let mut seen = vec![false; d];
        if perm.len() != d || perm.iter().any(|&p| p >= d || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation of 0..{d}")));
        }
        let lo: Vec<i64> = perm.iter().map(|&p| self.hull.lo[p]).collect();
        let hi: Vec<i64> = perm.iter().map(|&p| self.hull.hi[p]).collect();
        let hull = IntegerBox { lo, hi };
        Self::from_fn(&hull, |n| {
            let mut m = vec![0; d];
            for i in 0..d {
                m[perm[i]] = n[i];
            }
            self.get(&m)
        })
    }

    /// `g(n) = f(n')` where `n'` negates coordinate `axis`.
    pub fn reflected(&self, axis: usize) -> Result<Self> {
        if axis >= self.dim() {
            return Err(Error::InvalidAxis { axis, dim: self.dim() });
        }
        let mut lo = self.hull.lo.clone();
        let mut hi = self.hull.hi.clone();
        lo[axis] = -self.hull.hi[axis];
        hi[axis] = -self.hull.lo[axis];
        let hull = IntegerBox { lo, hi };
        Self::from_fn(&hull, |n| {
            let mut m = n.to_vec();
            m[axis] = -m[axis];
            self.get(&m)
        })
    }
}
