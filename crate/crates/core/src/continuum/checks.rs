//! Grid checks of derivative, domination and regularity properties of the
//! continuous operator.

use rayon::prelude::*;
use serde::Serialize;

use super::bumps::Bump;
use super::grid::{GridFunction, GridSpec};
use super::operator::{params_diameter, ProductInputs, RectSearch};
use super::params::RectParams;
use crate::error::{Error, Result};

/// Relative tolerance defining near-maximizers in the derivative check.
pub const ARGMAX_TOLERANCE: f64 = 1e-6;

fn sample_all(bumps: &[Bump], spec: &GridSpec) -> Result<Vec<GridFunction>> {
    if bumps.is_empty() {
        return Err(Error::EmptyFunctionList);
    }
    bumps.iter().map(|b| b.sample(spec)).collect()
}

fn check_axis(l: usize, dim: usize) -> Result<()> {
    if l >= dim {
        Err(Error::InvalidAxis { axis: l, dim })
    } else {
        Ok(())
    }
}

fn shifted(x: &[f64], l: usize, by: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[l] += by;
    y
}

/// Central difference of the grid operator along `l` with step `2h`, flushed
/// to zero below the rounding level of the two evaluations.
fn central_difference(inputs: &ProductInputs, x: &[f64], l: usize, h: f64, search: &RectSearch) -> Result<f64> {
    let delta = 2.0 * h;
    let plus = inputs.strong_max(&shifted(x, l, delta), search)?.0;
    let minus = inputs.strong_max(&shifted(x, l, -delta), search)?.0;
    let diff = plus - minus;
    Ok(if diff.abs() <= 1e-12 * (plus.abs() + minus.abs()) { 0.0 } else { diff / (2.0 * delta) })
}

#[derive(Debug, Clone, Serialize)]
pub struct GradientBound {
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
}

/// `|D_l 𝓜(f⃗)(x)| / Σ_μ 𝓜(f⃗_μ^l)(x)` at each sample, where `f⃗_μ^l` replaces
/// `f_μ` by its exact partial `∂_l f_μ`. A vanishing denominator with a
/// vanishing numerator counts as ratio 0.
pub fn pointwise_gradient_bound_check(
    bumps: &[Bump],
    spec: &GridSpec,
    samples: &[Vec<f64>],
    l: usize,
    search: &RectSearch,
) -> Result<GradientBound> {
    check_axis(l, spec.dim())?;
    let fs = sample_all(bumps, spec)?;
    let inputs = ProductInputs::new(&fs)?;
    let partials = bumps.iter().map(|b| b.sample_partial(spec, l)).collect::<Result<Vec<_>>>()?;
    let replaced = (0..fs.len())
        .map(|mu| {
            let mut v = fs.clone();
            v[mu] = partials[mu].clone();
            ProductInputs::new(&v)
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios = samples
        .par_iter()
        .map(|x| {
            let num = central_difference(&inputs, x, l, spec.spacing, search)?.abs();
            let mut den = 0.0;
            for r in &replaced {
                den += r.strong_max(x, search)?.0;
            }
            Ok(if num == 0.0 { 0.0 } else { num / den })
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_ratio = ratios.iter().fold(0.0f64, |a, b| a.max(*b));
    Ok(GradientBound { ratios, max_ratio })
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DerivativeOutcome {
    Checked { finite_difference: f64, formula: f64, residual: f64, argmax: RectParams },
    Skipped { reason: String, diameter: f64 },
}

/// Compares the central difference of the grid operator with the exact
/// derivative of the objective at the computed maximizer `r*`:
/// `Σ_μ V^{-m} ∏_{j≠μ} ∫_R |f_j| · ∫_R ∂_l|f_μ|`.
///
/// Skips the point when the near-maximizer set is wider than `3h` or when
/// `r*` touches the edge of the search grid: a single step of total extent
/// on some axis (the supremum then sits on a degenerate rectangle) or the
/// largest extent searched.
pub fn derivative_formula_check(
    bumps: &[Bump],
    spec: &GridSpec,
    x: &[f64],
    l: usize,
    search: &RectSearch,
) -> Result<DerivativeOutcome> {
    check_axis(l, spec.dim())?;
    let fs = sample_all(bumps, spec)?;
    let inputs = ProductInputs::new(&fs)?;
    let h = spec.spacing;
    let (_, arg) = inputs.strong_max(x, search)?;
    let near = inputs.near_maximizers(x, search, ARGMAX_TOLERANCE)?;
    let diameter = params_diameter(&near);
    if diameter > 3.0 * h {
        return Ok(DerivativeOutcome::Skipped { reason: "ambiguous maximizer".into(), diameter });
    }
    let reach: Vec<f64> = search.max_steps.iter().map(|k| *k as f64 * search.step).collect();
    let on_edge = (0..spec.dim()).any(|i| arg.lower[i] >= reach[i] - 1e-12 || arg.upper[i] >= reach[i] - 1e-12);
    if on_edge {
        return Ok(DerivativeOutcome::Skipped { reason: "maximizer on search boundary".into(), diameter });
    }
    let thinnest = (0..spec.dim()).any(|i| arg.length(i) <= search.step * (1.0 + 1e-9));
    if thinnest {
        return Ok(DerivativeOutcome::Skipped { reason: "maximizer at minimal extent".into(), diameter });
    }
    let d = spec.dim();
    let lo: Vec<f64> = (0..d).map(|i| x[i] - arg.lower[i]).collect();
    let hi: Vec<f64> = (0..d).map(|i| x[i] + arg.upper[i]).collect();
    let volume: f64 = (0..d).map(|i| arg.length(i)).product();
    let m = fs.len();
    let integrals: Vec<f64> = inputs.grids().iter().map(|g| g.integral_box(&lo, &hi)).collect();
    let mut formula = 0.0;
    for (mu, b) in bumps.iter().enumerate() {
        let dmu = b.sample_abs_partial(spec, l)?.integral_box(&lo, &hi);
        let others: f64 = (0..m).filter(|j| *j != mu).map(|j| integrals[j]).product();
        formula += others * dmu;
    }
    formula /= volume.powi(m as i32);
    let fd = central_difference(&inputs, x, l, h, search)?;
    Ok(DerivativeOutcome::Checked { finite_difference: fd, formula, residual: (fd - formula).abs(), argmax: arg })
}

/// `max_x [𝓜f(x) - (M^1 ∘ M^2 f)(x)]` for `m = 1` on a planar grid, where
/// `M^i` is the one-dimensional uncentered operator along axis `i` over the
/// same relative search.
pub fn iterated_1d_domination(f: &GridFunction, samples: &[Vec<f64>], search: &RectSearch) -> Result<f64> {
    if f.dim() != 2 {
        return Err(Error::InvalidDimension(f.dim()));
    }
    let strong = ProductInputs::new(std::slice::from_ref(f))?;
    let spec = f.spec();
    let (n0, n1) = (spec.shape[0], spec.shape[1]);
    let h = spec.spacing;
    let rows = (0..n0)
        .map(|a| {
            let row_spec = GridSpec::new(vec![spec.origin[1]], h, vec![n1])?;
            GridFunction::new(row_spec, f.samples()[a * n1..(a + 1) * n1].to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = rows.iter().map(|r| ProductInputs::new(std::slice::from_ref(r))).collect::<Result<Vec<_>>>()?;
    let inner = RectSearch::new(search.step, vec![search.max_steps[1]])?;
    let outer = RectSearch::new(search.step, vec![search.max_steps[0]])?;
    let slacks = samples
        .par_iter()
        .map(|x| {
            let lhs = strong.strong_max(x, search)?.0;
            let column = rows.iter().map(|r| r.strong_max(&[x[1]], &inner).map(|v| v.0)).collect::<Result<Vec<_>>>()?;
            let g = GridFunction::new(GridSpec::new(vec![spec.origin[0]], h, vec![n0])?, column)?;
            let rhs = ProductInputs::new(&[g])?.strong_max(&[x[0]], &outer)?.0;
            Ok(lhs - rhs)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(slacks.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// `max_x [|𝓜(f⃗)(x + t) - 𝓜(f⃗)(x)| - Σ_i 𝓜(f⃗_t^i)(x)]` for a shift `t` of
/// whole cells, with `f⃗_t^i = (f_1, …, f_{i-1}, (f_i)_t - f_i, (f_{i+1})_t, …, (f_m)_t)`
/// and `g_t(y) = g(y + t)`.
pub fn translation_difference_check(
    fs: &[GridFunction],
    shift_cells: &[i64],
    samples: &[Vec<f64>],
    search: &RectSearch,
) -> Result<f64> {
    let inputs = ProductInputs::new(fs)?;
    if shift_cells.len() != inputs.dim() {
        return Err(Error::DimensionMismatch { expected: inputs.dim(), found: shift_cells.len() });
    }
    let h = fs[0].spacing();
    let t: Vec<f64> = shift_cells.iter().map(|k| *k as f64 * h).collect();
    let back: Vec<f64> = t.iter().map(|v| -v).collect();
    let moved: Vec<GridFunction> = fs.iter().map(|f| f.translated(&back)).collect();
    let terms = (0..fs.len())
        .map(|i| {
            let mut v: Vec<GridFunction> = fs[..i].to_vec();
            v.push(moved[i].sub(&fs[i])?);
            v.extend(moved[i + 1..].iter().cloned());
            ProductInputs::new(&v)
        })
        .collect::<Result<Vec<_>>>()?;
    let slacks = samples
        .par_iter()
        .map(|x| {
            let xt: Vec<f64> = x.iter().zip(&t).map(|(a, b)| a + b).collect();
            let lhs = (inputs.strong_max(&xt, search)?.0 - inputs.strong_max(x, search)?.0).abs();
            let mut rhs = 0.0;
            for term in &terms {
                rhs += term.strong_max(x, search)?.0;
            }
            Ok(lhs - rhs)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(slacks.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone, Serialize)]
pub struct LipschitzReport {
    /// `2md / ε₀^{md+1} · ∏_j ‖f_j‖₁` with `ε₀ = min ε_i`.
    pub constant: f64,
    /// Largest `|M^ε(x) - M^ε(y)| / (constant · |x - y|)`.
    pub max_ratio: f64,
    pub violations: usize,
}

pub fn truncated_lipschitz_check(
    fs: &[GridFunction],
    eps: &[f64],
    pairs: &[(Vec<f64>, Vec<f64>)],
    search: &RectSearch,
) -> Result<LipschitzReport> {
    let inputs = ProductInputs::new(fs)?;
    let (m, d) = (inputs.m() as i32, inputs.dim() as i32);
    let eps0 = eps.iter().cloned().fold(f64::INFINITY, f64::min);
    let constant = 2.0 * (m * d) as f64 / eps0.powi(m * d + 1) * inputs.l1_product();
    let ratios = pairs
        .par_iter()
        .map(|(x, y)| {
            let diff = (inputs.truncated(x, eps, search)? - inputs.truncated(y, eps, search)?).abs();
            let dist = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            Ok(if diff == 0.0 { 0.0 } else { diff / (constant * dist) })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(LipschitzReport {
        constant,
        max_ratio: ratios.iter().fold(0.0f64, |a, b| a.max(*b)),
        violations: ratios.iter().filter(|r| **r > 1.0).count(),
    })
}
