//! Variation of maximal fields on ℤ^d: the multilinear gradient bound and its
//! continuity, the δ counterexample for one input, the sharp one-dimensional
//! inequalities, and pointwise domination of field differences.

mod random;

pub use random::{random_origin, random_spikes};

use serde::{Deserialize, Serialize};

use crate::engine::{gradient_l1_exact, StrongMaxEngine};
use crate::error::{Error, Result};
use crate::lattice::{total_variation, IntegerBox, LatticeFunction, PrefixSumTable};
use crate::numerics::harmonic;

/// Where a ratio trial came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialDescriptor {
    pub seed: Option<u64>,
    pub dim: usize,
    pub hull_shapes: Vec<Vec<usize>>,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTrial {
    pub input: TrialDescriptor,
    /// `‖∇𝕄(f⃗)‖_{ℓ¹}`
    pub numerator: f64,
    /// `Σ_l ‖∇f_l‖_{ℓ¹} ∏_{j≠l} ‖f_j‖_{ℓ¹}`
    pub denominator: f64,
    pub ratio: f64,
}

/// `Σ_l Var(f_l) ∏_{j≠l} ‖f_j‖₁`.
pub fn product_rule_denominator(fs: &[LatticeFunction]) -> f64 {
    let norms: Vec<f64> = fs.iter().map(LatticeFunction::l1_norm).collect();
    fs.iter()
        .enumerate()
        .map(|(l, f)| {
            let others: f64 = norms.iter().enumerate().filter(|(j, _)| *j != l).map(|(_, n)| n).product();
            total_variation(f) * others
        })
        .sum()
}

/// Both sides of the multilinear variation bound, with the gradient norm of
/// the maximal field summed exactly over all of ℤ^d (`d ≤ 2`).
pub fn thm17_ratio(fs: &[LatticeFunction]) -> Result<RatioTrial> {
    let engine = StrongMaxEngine::new(fs)?;
    if fs.len() < 2 {
        return Err(Error::InvalidParameter(
            "the variation bound needs m >= 2; for m = 1 the field gradient is unbounded, see delta_counterexample"
                .into(),
        ));
    }
    if fs.iter().any(LatticeFunction::is_zero) {
        return Err(Error::InvalidParameter("all inputs must be nonzero".into()));
    }
    let numerator = gradient_l1_exact(&engine)?;
    let denominator = product_rule_denominator(fs);
    Ok(RatioTrial {
        input: TrialDescriptor {
            seed: None,
            dim: engine.dim(),
            hull_shapes: fs.iter().map(LatticeFunction::shape).collect(),
            m: fs.len(),
        },
        numerator,
        denominator,
        ratio: numerator / denominator,
    })
}

/// `d (2H_{N+1} - 1)^{d-1} (2 - 2/(N+1))`, the variation of
/// `∏ (|n_i|+1)^{-1}` over differences inside `[-N, N]^d`.
pub fn delta_partial_variation_closed_form(d: usize, n: u64) -> f64 {
    let line_mass = 2.0 * harmonic(n + 1) - 1.0;
    d as f64 * line_mass.powi(d as i32 - 1) * (2.0 - 2.0 / (n as f64 + 1.0))
}

/// Field of the unit spike (one input) on `[-N, N]^d`: returns the maximum
/// deviation from `∏ (|n_i|+1)^{-1}` and the partial variation `S(N)` over
/// differences with both endpoints in the window.
pub fn delta_counterexample(d: usize, n: u64) -> Result<(f64, f64)> {
    if d == 1 {
        return Err(Error::InvalidParameter("d = 1 is the bounded case".into()));
    }
    if !(2..=3).contains(&d) {
        return Err(Error::InvalidDimension(d));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("N must be >= 2, got {n}")));
    }
    let delta = LatticeFunction::delta(&vec![0; d])?;
    let window = IntegerBox::centered_cube(d, n as i64)?;
    let field = StrongMaxEngine::new(&[delta])?.field(&window)?.values;
    let error = field
        .iter()
        .map(|(p, v)| {
            let exact: f64 = p.iter().map(|x| 1.0 / (x.abs() as f64 + 1.0)).product();
            (v - exact).abs()
        })
        .fold(0.0, f64::max);
    Ok((error, window_variation(&field)))
}

/// `Σ_l Σ |f(n + e_l) - f(n)|` over pairs with both points in the hull of `f`.
pub fn window_variation(f: &LatticeFunction) -> f64 {
    let hull = f.hull();
    let mut total = crate::numerics::KahanSum::new();
    let mut next = vec![0i64; f.dim()];
    for p in hull.points() {
        let here = f.get(&p);
        for l in 0..f.dim() {
            if p[l] < hull.hi()[l] {
                next.copy_from_slice(&p);
                next[l] += 1;
                total.add((f.get(&next) - here).abs());
            }
        }
    }
    total.value()
}

fn require_1d(f: &LatticeFunction) -> Result<()> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: f.dim() });
    }
    Ok(())
}

/// Centered maximal function `M̃f(n) = max_{r ≥ 0} |[n-r, n+r]|^{-1} Σ |f|`.
pub fn centered_maximal_1d(f: &LatticeFunction, n: i64) -> Result<f64> {
    require_1d(f)?;
    Ok(centered_at(&PrefixSumTable::new(f), f.support_hull().as_ref(), n))
}

fn centered_at(table: &PrefixSumTable, support: Option<&IntegerBox>, n: i64) -> f64 {
    let Some(s) = support else { return 0.0 };
    // Radii beyond the farther hull end only add empty cells.
    let r_max = (n - s.lo()[0]).abs().max((s.hi()[0] - n).abs());
    (0..=r_max)
        .map(|r| table.box_sum_bounds(&[n - r], &[n + r]) / (2 * r + 1) as f64)
        .fold(0.0, f64::max)
}

/// `(Var(M̃f), Var(f))` over all of ℤ. Outside the support hull `M̃f` is
/// monotone, so its variation telescopes to the hull values.
pub fn sharp_1d_centered(f: &LatticeFunction) -> Result<(f64, f64)> {
    require_1d(f)?;
    let Some(s) = f.support_hull() else {
        return Ok((0.0, 0.0));
    };
    let table = PrefixSumTable::new(f);
    let vals: Vec<f64> = (s.lo()[0]..=s.hi()[0]).map(|n| centered_at(&table, Some(&s), n)).collect();
    let var = vals[0] + vals[vals.len() - 1] + vals.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>();
    Ok((var, total_variation(f)))
}

/// `(Var(Mf) on [lo - N, hi + N], 2‖f‖₁)` for the uncentered operator, with
/// only differences inside the window counted.
pub fn sharp_1d_uncentered(f: &LatticeFunction, n: u64) -> Result<(f64, f64)> {
    require_1d(f)?;
    let bound = 2.0 * f.l1_norm();
    let Some(s) = f.support_hull() else {
        return Ok((0.0, bound));
    };
    let window = s.expanded(n as i64);
    let field = StrongMaxEngine::new(std::slice::from_ref(f))?.field(&window)?.values;
    Ok((window_variation(&field), bound))
}

/// `(Var(Mf) over ℤ, 2‖f‖₁)`.
pub fn sharp_1d_uncentered_exact(f: &LatticeFunction) -> Result<(f64, f64)> {
    require_1d(f)?;
    let engine = StrongMaxEngine::new(std::slice::from_ref(f))?;
    Ok((gradient_l1_exact(&engine)?, 2.0 * f.l1_norm()))
}

/// `max_n ( |𝕄(f⃗)(n) - 𝕄(g⃗)(n)| - Σ_μ 𝕄(F⃗_μ)(n) )` over `query`, with
/// `F⃗_μ = (f_1, …, f_{μ-1}, f_μ - g_μ, g_{μ+1}, …, g_m)`.
pub fn difference_domination(fs: &[LatticeFunction], gs: &[LatticeFunction], query: &IntegerBox) -> Result<f64> {
    if fs.len() != gs.len() {
        return Err(Error::InvalidParameter(format!(
            "input vectors differ in length: {} vs {}",
            fs.len(),
            gs.len()
        )));
    }
    let mf = StrongMaxEngine::new(fs)?.field(query)?.values;
    let mg = StrongMaxEngine::new(gs)?.field(query)?.values;
    let mut sum = LatticeFunction::zeros(query);
    for mu in 0..fs.len() {
        let mut v: Vec<LatticeFunction> = Vec::with_capacity(fs.len());
        v.extend_from_slice(&fs[..mu]);
        v.push(fs[mu].sub(&gs[mu])?);
        v.extend_from_slice(&gs[mu + 1..]);
        let part = StrongMaxEngine::new(&v)?.field(query)?.values;
        sum = sum.axpy(1.0, &part)?;
    }
    Ok(mf
        .values()
        .iter()
        .zip(mg.values())
        .zip(sum.values())
        .map(|((a, b), s)| (a - b).abs() - s)
        .fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityRun {
    /// `e_i` for `i = 1..=steps`.
    pub errors: Vec<f64>,
    /// `max_i 2^i e_i`.
    pub constant: f64,
    pub window: IntegerBox,
}

pub const CONTINUITY_MARGIN: i64 = 16;

/// `e_i = ‖∇𝕄(f⃗ + 2^{-i} h⃗) - ∇𝕄(f⃗)‖₁` for `i = 1..=steps`, summed over
/// differences inside a fixed window (the union hull grown by `margin`).
pub fn continuity_experiment(
    fs: &[LatticeFunction],
    hs: &[LatticeFunction],
    steps: u32,
    margin: i64,
) -> Result<ContinuityRun> {
    if fs.len() < 2 {
        return Err(Error::InvalidParameter("continuity experiment needs m >= 2".into()));
    }
    if fs.len() != hs.len() {
        return Err(Error::InvalidParameter("f and h differ in length".into()));
    }
    for (f, h) in fs.iter().zip(hs) {
        if h.l1_norm() > f.l1_norm() {
            return Err(Error::InvalidParameter("perturbation must satisfy ‖h_j‖₁ ≤ ‖f_j‖₁".into()));
        }
    }
    let mut window = fs[0].hull().clone();
    for f in fs.iter().chain(hs) {
        if f.dim() != window.dim() {
            return Err(Error::DimensionMismatch { expected: window.dim(), found: f.dim() });
        }
        window = window.hull_with(f.hull());
    }
    let window = window.expanded(margin);
    let base = StrongMaxEngine::new(fs)?.field(&window)?.values;
    let mut errors = Vec::with_capacity(steps as usize);
    for i in 1..=steps {
        let scale = 0.5f64.powi(i as i32);
        let gs: Vec<LatticeFunction> = fs.iter().zip(hs).map(|(f, h)| f.axpy(scale, h)).collect::<Result<_>>()?;
        let field = StrongMaxEngine::new(&gs)?.field(&window)?.values;
        errors.push(window_variation(&field.sub(&base)?));
    }
    let constant = errors
        .iter()
        .enumerate()
        .map(|(i, e)| e * 2f64.powi(i as i32 + 1))
        .fold(0.0, f64::max);
    Ok(ContinuityRun { errors, constant, window })
}
