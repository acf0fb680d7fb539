//! Besov and Triebel–Lizorkin seminorms through dyadic differences
//! `Δ_{2^{-k}ζ} f(x) = f(x + 2^{-k}ζ) - f(x)` averaged over the annulus
//! `1/2 < |ζ| ≤ 1`.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::grid::{GridFunction, GridSpec};
use super::operator::{ProductInputs, RectSearch};
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, KahanSum};
use crate::seed::SeedTree;

/// Quadrature for `∫_{1/2<|ζ|≤1} g(ζ) dζ` in dimension 1 or 2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusSampler {
    pub dim: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl AnnulusSampler {
    /// Gauss–Legendre in the radius on `(1/2, 1]`. In the plane, `n_angular`
    /// equispaced angles with a seeded rotation; the radial weight carries `ρ`.
    pub fn new(dim: usize, n_radial: usize, n_angular: usize, seed: u64) -> Result<Self> {
        if n_radial == 0 || (dim == 2 && n_angular == 0) {
            return Err(Error::InvalidParameter("annulus quadrature needs nodes".into()));
        }
        let (gx, gw) = gauss_legendre(n_radial);
        let radial: Vec<(f64, f64)> = gx.iter().zip(&gw).map(|(t, w)| (0.75 + 0.25 * t, 0.25 * w)).collect();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        match dim {
            1 => {
                for (rho, w) in &radial {
                    for sign in [-1.0, 1.0] {
                        nodes.push(vec![sign * rho]);
                        weights.push(*w);
                    }
                }
            }
            2 => {
                let offset: f64 = SeedTree::new(seed).child("annulus").rng().random();
                for k in 0..n_angular {
                    let theta = 2.0 * PI * (k as f64 + offset) / n_angular as f64;
                    for (rho, w) in &radial {
                        nodes.push(vec![rho * theta.cos(), rho * theta.sin()]);
                        weights.push(w * rho * 2.0 * PI / n_angular as f64);
                    }
                }
            }
            d => return Err(Error::InvalidDimension(d)),
        }
        Ok(Self { dim, nodes, weights })
    }

    /// `1` on the line, `3π/4` in the plane.
    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Dyadic levels `k_min..=k_max`.
pub type KRange = (i32, i32);

/// Largest admissible range inside `k_range` whose finest shift `2^{-k}` is
/// at least `h`.
pub fn clamp_k_range(k_range: KRange, h: f64) -> KRange {
    let finest = (-h.log2()).floor() as i32;
    (k_range.0, k_range.1.min(finest))
}

fn check_k_range(k_range: KRange, h: f64) -> Result<()> {
    if k_range.0 > k_range.1 {
        return Err(Error::InvalidParameter(format!("empty k range {k_range:?}")));
    }
    if 2f64.powi(-k_range.1) < h * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "k range {k_range:?} resolves shifts below grid spacing {h}"
        )));
    }
    Ok(())
}

fn check_smoothness(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter(format!("smoothness must lie in (0, 1), got {s}")));
    }
    Ok(())
}

/// `B[x][k] = ∫ |Δ_{2^{-k}ζ} f(x)|^r dζ` at the centers of the grid grown to
/// contain every shifted point.
fn difference_table(f: &GridFunction, r: f64, k_range: KRange, sampler: &AnnulusSampler) -> Result<(Vec<Vec<f64>>, f64)> {
    if sampler.dim != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: sampler.dim });
    }
    let h = f.spacing();
    check_k_range(k_range, h)?;
    let margin = (2f64.powi(-k_range.0) / h).ceil() as usize + 1;
    let spec: GridSpec = f.spec().expanded(margin);
    let levels: Vec<f64> = (k_range.0..=k_range.1).map(|k| 2f64.powi(-k)).collect();
    let table = (0..spec.len())
        .into_par_iter()
        .map(|i| {
            let x = spec.center(i);
            let fx = f.value_at(&x);
            levels
                .iter()
                .map(|t| {
                    sampler
                        .nodes
                        .iter()
                        .zip(&sampler.weights)
                        .map(|(z, w)| {
                            let y: Vec<f64> = x.iter().zip(z).map(|(a, b)| a + t * b).collect();
                            w * (f.value_at(&y) - fx).abs().powf(r)
                        })
                        .collect::<KahanSum>()
                        .value()
                })
                .collect()
        })
        .collect();
    Ok((table, h.powi(f.dim() as i32)))
}

/// `(Σ_k 2^{ksq} ‖(∫ |Δ_{2^{-k}ζ} f|^r dζ)^{1/r}‖_{L^p}^q)^{1/q}`; `q = ∞`
/// takes the supremum over `k`.
pub fn besov_seminorm(f: &GridFunction, s: f64, p: f64, q: f64, r: f64, k_range: KRange, sampler: &AnnulusSampler) -> Result<f64> {
    check_smoothness(s)?;
    if !(p >= 1.0 && p.is_finite()) || !(r >= 1.0 && r <= p) || !(q >= 1.0) {
        return Err(Error::InvalidParameter(format!("need 1 ≤ r ≤ p < ∞ and q ≥ 1, got r={r}, p={p}, q={q}")));
    }
    let (table, cell) = difference_table(f, r, k_range, sampler)?;
    let mut acc = KahanSum::new();
    let mut sup = 0.0f64;
    for (idx, k) in (k_range.0..=k_range.1).enumerate() {
        let lp = (table.iter().map(|row| row[idx].powf(p / r)).collect::<KahanSum>().value() * cell).powf(1.0 / p);
        let term = 2f64.powf(k as f64 * s) * lp;
        if q.is_infinite() {
            sup = sup.max(term);
        } else {
            acc.add(term.powf(q));
        }
    }
    Ok(if q.is_infinite() { sup } else { acc.value().powf(1.0 / q) })
}

/// `‖(Σ_k 2^{ksq} (∫ |Δ_{2^{-k}ζ} f| dζ)^q)^{1/q}‖_{L^p}`.
pub fn tl_seminorm(f: &GridFunction, s: f64, p: f64, q: f64, sampler: &AnnulusSampler, k_range: KRange) -> Result<f64> {
    check_smoothness(s)?;
    if !(p >= 1.0 && p.is_finite()) || !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("need finite p, q ≥ 1, got p={p}, q={q}")));
    }
    let (table, cell) = difference_table(f, 1.0, k_range, sampler)?;
    let weights: Vec<f64> = (k_range.0..=k_range.1).map(|k| 2f64.powf(k as f64 * s * q)).collect();
    let total = table
        .iter()
        .map(|row| {
            let inner = row.iter().zip(&weights).map(|(b, w)| w * b.powf(q)).collect::<KahanSum>().value();
            inner.powf(p / q)
        })
        .collect::<KahanSum>()
        .value();
    Ok((total * cell).powf(1.0 / p))
}

/// Seminorm with `r = p` plus the `L^p` norm.
pub fn besov_norm(f: &GridFunction, s: f64, p: f64, q: f64, k_range: KRange, sampler: &AnnulusSampler) -> Result<f64> {
    Ok(besov_seminorm(f, s, p, q, p, k_range, sampler)? + f.lp_norm(p)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundednessRatio {
    pub p: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

/// `‖𝓜(f⃗)‖_{B^{p,q}_s} / ∏_i ‖f_i‖_{B^{p_i,q}_s}` with `1/p = Σ 1/p_i`. The
/// field is sampled on the common grid of the inputs grown by `margin` cells.
#[allow(clippy::too_many_arguments)]
pub fn besov_boundedness_ratio(
    fs: &[GridFunction],
    s: f64,
    ps: &[f64],
    q: f64,
    k_range: KRange,
    sampler: &AnnulusSampler,
    search: &RectSearch,
    margin: usize,
) -> Result<BoundednessRatio> {
    if ps.len() != fs.len() {
        return Err(Error::DimensionMismatch { expected: fs.len(), found: ps.len() });
    }
    let inv: f64 = ps.iter().map(|p| 1.0 / p).sum();
    let p = 1.0 / inv;
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("combined exponent {p} is below 1")));
    }
    let mut union = fs.first().ok_or(Error::EmptyFunctionList)?.map(|_| 0.0);
    for f in fs {
        union = union.axpy(0.0, f)?;
    }
    let field = ProductInputs::new(fs)?.field(&union.spec().expanded(margin), search)?;
    let numerator = besov_norm(&field, s, p, q, k_range, sampler)?;
    let mut denominator = 1.0;
    for (f, pi) in fs.iter().zip(ps) {
        denominator *= besov_norm(f, s, *pi, q, k_range, sampler)?;
    }
    Ok(BoundednessRatio { p, numerator, denominator, ratio: numerator / denominator })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(spec: GridSpec) -> GridFunction {
        GridFunction::from_fn(spec, |x| (-(x.iter().map(|v| v * v).sum::<f64>()) * 2.0).exp()).unwrap()
    }

    #[test]
    fn annulus_measure_and_membership() {
        let a = AnnulusSampler::new(2, 4, 12, 3).unwrap();
        assert!((a.measure() - 0.75 * PI).abs() < 1e-13);
        assert!(a.nodes.iter().all(|z| {
            let r = (z[0] * z[0] + z[1] * z[1]).sqrt();
            r > 0.5 && r <= 1.0
        }));
        assert_eq!(a, AnnulusSampler::new(2, 4, 12, 3).unwrap());
        let b = AnnulusSampler::new(1, 3, 0, 0).unwrap();
        assert!((b.measure() - 1.0).abs() < 1e-14);
        // ∫ |ζ|² over the planar annulus is 2π (1 - 1/16) / 4
        let second: f64 = a.nodes.iter().zip(&a.weights).map(|(z, w)| w * (z[0] * z[0] + z[1] * z[1])).sum();
        assert!((second - 2.0 * PI * (15.0 / 16.0) / 4.0).abs() < 1e-13);
    }

    #[test]
    fn zero_function() {
        let spec = GridSpec::covering(&[-1.0, -1.0], &[1.0, 1.0], 0.1).unwrap();
        let f = GridFunction::new(spec.clone(), vec![0.0; spec.len()]).unwrap();
        let a = AnnulusSampler::new(2, 2, 6, 0).unwrap();
        assert_eq!(besov_seminorm(&f, 0.5, 2.0, 2.0, 1.0, (0, 2), &a).unwrap(), 0.0);
        assert_eq!(tl_seminorm(&f, 0.5, 2.0, 2.0, &a, (0, 2)).unwrap(), 0.0);
    }

    #[test]
    fn resolution_limit() {
        let spec = GridSpec::covering(&[-1.0], &[1.0], 0.1).unwrap();
        let f = bump(spec);
        let a = AnnulusSampler::new(1, 3, 0, 0).unwrap();
        assert!(besov_seminorm(&f, 0.5, 2.0, 2.0, 1.0, (0, 4), &a).is_err());
        assert_eq!(clamp_k_range((0, 6), 0.1), (0, 3));
        assert!(besov_seminorm(&f, 0.5, 2.0, 2.0, 1.0, clamp_k_range((0, 6), 0.1), &a).is_ok());
    }

    #[test]
    fn translation_invariance() {
        let spec = GridSpec::covering(&[-2.0, -2.0], &[2.0, 2.0], 0.1).unwrap();
        let f = bump(spec);
        let a = AnnulusSampler::new(2, 2, 8, 1).unwrap();
        let v = besov_seminorm(&f, 0.5, 2.0, 2.0, 2.0, (0, 3), &a).unwrap();
        let w = besov_seminorm(&f.translated(&[0.3, -0.7]), 0.5, 2.0, 2.0, 2.0, (0, 3), &a).unwrap();
        assert!((v - w).abs() < 1e-10 * v);
    }

    #[test]
    fn dilation_scaling() {
        let spec = GridSpec::covering(&[-2.0, -2.0], &[2.0, 2.0], 0.1).unwrap();
        let f = bump(spec);
        let a = AnnulusSampler::new(2, 2, 8, 1).unwrap();
        let (s, p) = (0.5, 2.0);
        let v = besov_seminorm(&f, s, p, 2.0, 1.0, (0, 3), &a).unwrap();
        let w = besov_seminorm(&f.dilated(2.0).unwrap(), s, p, 2.0, 1.0, (1, 4), &a).unwrap();
        let expect = 2f64.powf(s - 2.0 / p);
        assert!((w / v - expect).abs() < 1e-9, "{} vs {expect}", w / v);
    }

    #[test]
    fn tl_equals_besov_when_exponents_match() {
        let spec = GridSpec::covering(&[-2.0, -2.0], &[2.0, 2.0], 0.1).unwrap();
        let f = bump(spec);
        let a = AnnulusSampler::new(2, 3, 8, 5).unwrap();
        for p in [1.0, 2.0, 3.0] {
            let b = besov_seminorm(&f, 0.4, p, p, 1.0, (-1, 3), &a).unwrap();
            let t = tl_seminorm(&f, 0.4, p, p, &a, (-1, 3)).unwrap();
            assert!((b - t).abs() < 1e-6 * b.max(1.0), "p={p}: {b} vs {t}");
        }
    }

    #[test]
    fn tl_stable_under_sampler_refinement() {
        let spec = GridSpec::covering(&[-2.0, -2.0], &[2.0, 2.0], 0.05).unwrap();
        let f = bump(spec);
        let coarse = tl_seminorm(&f, 0.5, 2.0, 2.0, &AnnulusSampler::new(2, 2, 8, 0).unwrap(), (0, 4)).unwrap();
        let fine = tl_seminorm(&f, 0.5, 2.0, 2.0, &AnnulusSampler::new(2, 4, 16, 0).unwrap(), (0, 4)).unwrap();
        assert!((coarse / fine - 1.0).abs() < 0.05, "{coarse} vs {fine}");
    }

    #[test]
    fn boundedness_ratio_is_scale_invariant() {
        let spec = GridSpec::covering(&[-1.5], &[1.5], 0.1).unwrap();
        let f = bump(spec.clone());
        let g = GridFunction::from_fn(spec, |x| 1.0 / (1.0 + 4.0 * x[0] * x[0])).unwrap();
        let a = AnnulusSampler::new(1, 3, 0, 0).unwrap();
        let search = RectSearch::uniform(1, 0.1, 20).unwrap();
        let base = besov_boundedness_ratio(&[f.clone(), g.clone()], 0.5, &[2.0, 2.0], 2.0, (0, 3), &a, &search, 10).unwrap();
        assert!((base.p - 1.0).abs() < 1e-15);
        let scaled =
            besov_boundedness_ratio(&[f.map(|v| 3.0 * v), g.clone()], 0.5, &[2.0, 2.0], 2.0, (0, 3), &a, &search, 10).unwrap();
        assert!((scaled.ratio / base.ratio - 1.0).abs() < 1e-10);
        let moved = besov_boundedness_ratio(
            &[f.translated(&[0.5]), g.translated(&[0.5])],
            0.5,
            &[2.0, 2.0],
            2.0,
            (0, 3),
            &a,
            &search,
            10,
        )
        .unwrap();
        assert!((moved.ratio / base.ratio - 1.0).abs() < 1e-9);
    }
}
