use serde::{Deserialize, Serialize};

use super::grid::{GridFunction, GridSpec};
use crate::error::Result;

/// Closed-form test inputs with exact partial derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Bump {
    /// `a · exp(-|x - c|² / (2σ²))`.
    Gaussian { center: Vec<f64>, sigma: f64, amplitude: f64 },
    /// `a · ∏_i max(0, 1 - |x_i - c_i| / ρ)`.
    Tent { center: Vec<f64>, radius: f64, amplitude: f64 },
    /// `a · ∏_i` of a C¹ smoothstep rising over `[lo_i - w/2, lo_i + w/2]`
    /// and falling over `[hi_i - w/2, hi_i + w/2]`.
    MollifiedBox { lo: Vec<f64>, hi: Vec<f64>, width: f64, amplitude: f64 },
}

fn smoothstep(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        (0.0, 0.0)
    } else if t >= 1.0 {
        (1.0, 0.0)
    } else {
        (t * t * (3.0 - 2.0 * t), 6.0 * t * (1.0 - t))
    }
}

impl Bump {
    pub fn gaussian(center: &[f64], sigma: f64) -> Self {
        Bump::Gaussian { center: center.to_vec(), sigma, amplitude: 1.0 }
    }

    pub fn tent(center: &[f64], radius: f64) -> Self {
        Bump::Tent { center: center.to_vec(), radius, amplitude: 1.0 }
    }

    /// Indicator of `[lo, hi]` smoothed over a transition of width `2h`.
    pub fn mollified_box(lo: &[f64], hi: &[f64], h: f64) -> Self {
        Bump::MollifiedBox { lo: lo.to_vec(), hi: hi.to_vec(), width: 2.0 * h, amplitude: 1.0 }
    }

    pub fn dim(&self) -> usize {
        match self {
            Bump::Gaussian { center, .. } | Bump::Tent { center, .. } => center.len(),
            Bump::MollifiedBox { lo, .. } => lo.len(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            Bump::Gaussian { amplitude, .. } | Bump::Tent { amplitude, .. } | Bump::MollifiedBox { amplitude, .. } => {
                *amplitude *= c
            }
        }
        out
    }

    /// Per-axis factors and their derivatives.
    fn factors(&self, x: &[f64]) -> (f64, Vec<(f64, f64)>) {
        match self {
            Bump::Gaussian { center, sigma, amplitude } => {
                let s2 = sigma * sigma;
                let f = x
                    .iter()
                    .zip(center)
                    .map(|(xi, ci)| {
                        let t = xi - ci;
                        let v = (-t * t / (2.0 * s2)).exp();
                        (v, -t / s2 * v)
                    })
                    .collect();
                (*amplitude, f)
            }
            Bump::Tent { center, radius, amplitude } => {
                let f = x
                    .iter()
                    .zip(center)
                    .map(|(xi, ci)| {
                        let t = (xi - ci) / radius;
                        if t.abs() >= 1.0 {
                            (0.0, 0.0)
                        } else {
                            (1.0 - t.abs(), -t.signum() / radius * f64::from(t != 0.0))
                        }
                    })
                    .collect();
                (*amplitude, f)
            }
            Bump::MollifiedBox { lo, hi, width, amplitude } => {
                let f = (0..x.len())
                    .map(|i| {
                        let (up, dup) = smoothstep((x[i] - lo[i]) / width + 0.5);
                        let (down, ddown) = smoothstep((hi[i] - x[i]) / width + 0.5);
                        (up * down, (dup * down - up * ddown) / width)
                    })
                    .collect();
                (*amplitude, f)
            }
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let (a, f) = self.factors(x);
        a * f.iter().map(|p| p.0).product::<f64>()
    }

    /// `∂f/∂x_l`.
    pub fn partial(&self, x: &[f64], l: usize) -> f64 {
        let (a, f) = self.factors(x);
        a * f.iter().enumerate().map(|(i, p)| if i == l { p.1 } else { p.0 }).product::<f64>()
    }

    pub fn sample(&self, spec: &GridSpec) -> Result<GridFunction> {
        GridFunction::from_fn(spec.clone(), |x| self.value(x))
    }

    pub fn sample_partial(&self, spec: &GridSpec, l: usize) -> Result<GridFunction> {
        GridFunction::from_fn(spec.clone(), |x| self.partial(x, l))
    }

    /// `∂|f|/∂x_l = sign(f) ∂f/∂x_l`.
    pub fn sample_abs_partial(&self, spec: &GridSpec, l: usize) -> Result<GridFunction> {
        GridFunction::from_fn(spec.clone(), |x| {
            let v = self.value(x);
            if v == 0.0 {
                0.0
            } else {
                v.signum() * self.partial(x, l)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partials_match_central_differences() {
        let bumps = [
            Bump::Gaussian { center: vec![0.2, -0.1], sigma: 0.7, amplitude: 1.5 },
            Bump::tent(&[0.1, 0.3], 1.2),
            Bump::mollified_box(&[-0.5, -0.4], &[0.6, 0.7], 0.2),
        ];
        let x = [0.37, -0.02];
        let e = 1e-6;
        for b in &bumps {
            for l in 0..2 {
                let mut xp = x;
                let mut xm = x;
                xp[l] += e;
                xm[l] -= e;
                let fd = (b.value(&xp) - b.value(&xm)) / (2.0 * e);
                assert!((fd - b.partial(&x, l)).abs() < 1e-6, "{b:?} axis {l}");
            }
        }
    }

    #[test]
    fn mollified_box_is_an_indicator_away_from_edges() {
        let b = Bump::mollified_box(&[0.0], &[1.0], 0.05);
        assert_eq!(b.value(&[0.5]), 1.0);
        assert_eq!(b.value(&[-0.06]), 0.0);
        assert_eq!(b.value(&[0.0]), 0.5);
        assert_eq!(b.value(&[1.06]), 0.0);
    }
}
