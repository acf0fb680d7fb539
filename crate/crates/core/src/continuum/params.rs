use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One-sided extents of a rectangle around `x`: axis `i` spans
/// `[x_i - lower[i], x_i + upper[i]]`. In the plane these are
/// `(r11, r12, r21, r22) = (lower[0], upper[0], lower[1], upper[1])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectParams {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Which branch of the rectangle objective applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stratum {
    /// All extents zero: the product of point values.
    Origin,
    /// Only `axis` has positive total extent: a segment through `x`.
    Segment(usize),
    /// Every axis has positive total extent.
    Full,
}

impl RectParams {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() || lower.len() > 2 {
            return Err(Error::InvalidShape(format!("extents {lower:?} / {upper:?}")));
        }
        if lower.iter().chain(&upper).any(|r| !(*r >= 0.0 && r.is_finite())) {
            return Err(Error::InvalidParameter(format!("extents must be nonnegative, got {lower:?} / {upper:?}")));
        }
        Ok(Self { lower, upper })
    }

    /// Planar extents in the order `(r11, r12, r21, r22)`.
    pub fn planar(r11: f64, r12: f64, r21: f64, r22: f64) -> Result<Self> {
        Self::new(vec![r11, r21], vec![r12, r22])
    }

    pub fn zero(dim: usize) -> Self {
        Self { lower: vec![0.0; dim], upper: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// `lower[i] + upper[i]`.
    pub fn length(&self, axis: usize) -> f64 {
        self.lower[axis] + self.upper[axis]
    }

    pub fn stratum(&self) -> Stratum {
        let positive: Vec<usize> = (0..self.dim()).filter(|&i| self.length(i) > 0.0).collect();
        match positive.len() {
            0 => Stratum::Origin,
            n if n == self.dim() => Stratum::Full,
            _ => Stratum::Segment(positive[0]),
        }
    }

    /// Extents as a flat vector `(lower[0], upper[0], lower[1], upper[1])`.
    pub fn as_vec(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).flat_map(|(a, b)| [*a, *b]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strata() {
        assert_eq!(RectParams::planar(0.0, 0.0, 0.0, 0.0).unwrap().stratum(), Stratum::Origin);
        assert_eq!(RectParams::planar(0.5, 0.0, 0.0, 0.0).unwrap().stratum(), Stratum::Segment(0));
        assert_eq!(RectParams::planar(0.0, 0.0, 0.0, 2.0).unwrap().stratum(), Stratum::Segment(1));
        assert_eq!(RectParams::planar(0.0, 1.0, 2.0, 0.0).unwrap().stratum(), Stratum::Full);
        assert_eq!(RectParams::new(vec![0.0], vec![0.1]).unwrap().stratum(), Stratum::Full);
        assert!(RectParams::planar(-0.1, 0.0, 0.0, 0.0).is_err());
        assert_eq!(RectParams::planar(1.0, 2.0, 3.0, 4.0).unwrap().as_vec(), vec![1.0, 2.0, 3.0, 4.0]);
    }
}
