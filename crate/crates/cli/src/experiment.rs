//! Config-driven experiments: `{"op": ..., "params": {...}, "seed": ...}`.
//! Outcomes are recorded as metrics and tables; only execution errors fail.

use anyhow::{anyhow, bail, Context, Result};
use rand::Rng;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use strongmax::continuum::{
    besov_seminorm, derivative_formula_check, pointwise_gradient_bound_check, tl_seminorm, AnnulusSampler, Bump,
    DerivativeOutcome, GridFunction, GridSpec, RectSearch,
};
use strongmax::report::{ExperimentReport, Table};
use strongmax::seed::SeedTree;
use strongmax::variation::{
    continuity_experiment, delta_counterexample, delta_partial_variation_closed_form, random_origin, random_spikes,
    sharp_1d_centered, sharp_1d_uncentered_exact, thm17_ratio,
};
use strongmax::LatticeFunction;

pub const OPS: [&str; 7] =
    ["delta_counterexample", "thm17_ratio", "continuity", "sharp_1d", "besov_seminorm", "tl_seminorm", "gradient_bound"];

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    op: String,
    #[serde(default)]
    params: Value,
    seed: Option<u64>,
}

/// Runs the experiment in `text`. `seed` overrides the config seed.
pub fn run(text: &str, seed: Option<u64>) -> Result<ExperimentReport> {
    let cfg: Config = serde_json::from_str(text).context("parsing experiment config")?;
    let seed = seed.or(cfg.seed).unwrap_or(0);
    let params = if cfg.params.is_null() { Value::Object(Default::default()) } else { cfg.params };
    match cfg.op.as_str() {
        "delta_counterexample" => delta(parse(params)?, seed),
        "thm17_ratio" => ratio_sweep(parse(params)?, seed),
        "continuity" => continuity(parse(params)?, seed),
        "sharp_1d" => sharp_1d(parse(params)?, seed),
        "besov_seminorm" => seminorms(parse(params)?, seed, false),
        "tl_seminorm" => seminorms(parse(params)?, seed, true),
        "gradient_bound" => gradient(parse(params)?, seed),
        other => bail!("unknown op {other:?}; expected one of {OPS:?}"),
    }
}

fn parse<T: DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| anyhow!("invalid params: {e}"))
}

fn rng(seed: u64, op: &str) -> rand_chacha::ChaCha8Rng {
    SeedTree::new(seed).child(op).rng()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct DeltaParams {
    d: usize,
    sizes: Vec<u64>,
}

impl Default for DeltaParams {
    fn default() -> Self {
        Self { d: 2, sizes: vec![8, 16, 32] }
    }
}

fn delta(p: DeltaParams, seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("delta_counterexample", seed);
    rep.param("d", p.d).param("sizes", &p.sizes);
    let mut table = Table::new(&["N", "S", "closed_form", "field_error"]);
    for &n in &p.sizes {
        let (err, s) = delta_counterexample(p.d, n)?;
        let closed = delta_partial_variation_closed_form(p.d, n);
        table.push(&[n as f64, s, closed, err]);
        rep.metric(&format!("S_{n}"), s).metric(&format!("closed_form_gap_{n}"), (s - closed).abs());
    }
    rep.table("partial_variation", table);
    Ok(rep)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RatioParams {
    dim: usize,
    m: usize,
    sizes: Vec<usize>,
    trials: usize,
    max_value: u32,
    spread: i64,
}

impl Default for RatioParams {
    fn default() -> Self {
        Self { dim: 2, m: 2, sizes: vec![5, 9], trials: 50, max_value: 9, spread: 4 }
    }
}

fn spikes(rng: &mut rand_chacha::ChaCha8Rng, dim: usize, m: usize, side: usize, max_value: u32, spread: i64) -> Vec<LatticeFunction> {
    (0..m)
        .map(|_| {
            let origin = random_origin(rng, dim, spread);
            random_spikes(rng, side, max_value, &origin)
        })
        .collect()
}

fn ratio_sweep(p: RatioParams, seed: u64) -> Result<ExperimentReport> {
    if p.max_value == 0 || p.sizes.contains(&0) {
        bail!("sizes and max_value must be positive");
    }
    let mut rep = ExperimentReport::new("thm17_ratio", seed);
    rep.param("dim", p.dim).param("m", p.m).param("sizes", &p.sizes).param("trials", p.trials);
    rep.param("max_value", p.max_value).param("spread", p.spread);
    let mut table = Table::new(&["hull_size", "trial", "numerator", "denominator", "ratio"]);
    for &size in &p.sizes {
        let mut rng = rng(seed, &format!("thm17_ratio/{size}"));
        let mut max = 0.0f64;
        for t in 0..p.trials {
            let fs = spikes(&mut rng, p.dim, p.m, size, p.max_value, p.spread);
            let r = thm17_ratio(&fs)?;
            max = max.max(r.ratio);
            table.push(&[size as f64, t as f64, r.numerator, r.denominator, r.ratio]);
        }
        rep.metric(&format!("max_ratio_size{size}"), max);
    }
    rep.table("ratios", table);
    Ok(rep)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ContinuityParams {
    dim: usize,
    m: usize,
    side: usize,
    runs: usize,
    steps: u32,
    margin: i64,
}

impl Default for ContinuityParams {
    fn default() -> Self {
        Self { dim: 2, m: 2, side: 5, runs: 4, steps: 12, margin: strongmax::variation::CONTINUITY_MARGIN }
    }
}

fn continuity(p: ContinuityParams, seed: u64) -> Result<ExperimentReport> {
    if p.side == 0 {
        bail!("side must be positive");
    }
    let mut rep = ExperimentReport::new("continuity", seed);
    rep.param("dim", p.dim).param("m", p.m).param("side", p.side).param("runs", p.runs);
    rep.param("steps", p.steps).param("margin", p.margin);
    let mut rng = rng(seed, "continuity");
    let mut table = Table::new(&["run", "step", "error"]);
    for run in 0..p.runs {
        let fs = spikes(&mut rng, p.dim, p.m, p.side, 9, 3);
        let hs: Vec<LatticeFunction> = fs
            .iter()
            .map(|f| {
                let h = spikes(&mut rng, p.dim, 1, p.side.min(3), 9, 3).remove(0);
                let scale = rng.random_range(0.1..=1.0) * f.l1_norm() / h.l1_norm();
                h.scaled(scale)
            })
            .collect();
        let out = continuity_experiment(&fs, &hs, p.steps, p.margin)?;
        for (i, e) in out.errors.iter().enumerate() {
            table.push(&[run as f64, (i + 1) as f64, *e]);
        }
        rep.metric(&format!("constant_run{run}"), out.constant);
    }
    rep.table("errors", table);
    Ok(rep)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SharpParams {
    trials: usize,
    max_side: usize,
    max_value: u32,
}

impl Default for SharpParams {
    fn default() -> Self {
        Self { trials: 100, max_side: 12, max_value: 9 }
    }
}

fn sharp_1d(p: SharpParams, seed: u64) -> Result<ExperimentReport> {
    if p.max_side == 0 || p.max_value == 0 {
        bail!("max_side and max_value must be positive");
    }
    let mut rep = ExperimentReport::new("sharp_1d", seed);
    rep.param("trials", p.trials).param("max_side", p.max_side).param("max_value", p.max_value);
    let mut rng = rng(seed, "sharp_1d");
    let mut table = Table::new(&["trial", "var_uncentered", "two_l1", "var_centered", "var_f"]);
    let (mut worst_u, mut worst_c) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for t in 0..p.trials {
        let side = rng.random_range(1..=p.max_side);
        let f = spikes(&mut rng, 1, 1, side, p.max_value, 5).remove(0);
        let (vu, bu) = sharp_1d_uncentered_exact(&f)?;
        let (vc, bc) = sharp_1d_centered(&f)?;
        worst_u = worst_u.max(vu / bu);
        worst_c = worst_c.max(vc / bc);
        table.push(&[t as f64, vu, bu, vc, bc]);
    }
    rep.metric("max_uncentered_ratio", worst_u).metric("max_centered_ratio", worst_c);
    rep.table("trials", table);
    Ok(rep)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SeminormParams {
    bump: Bump,
    h: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
    s: Vec<f64>,
    p: f64,
    q: f64,
    #[serde(default = "one")]
    r: f64,
    k_min: i32,
    k_max: i32,
    #[serde(default = "default_radial")]
    n_radial: usize,
    #[serde(default = "default_angular")]
    n_angular: usize,
}

fn one() -> f64 {
    1.0
}

fn default_radial() -> usize {
    4
}

fn default_angular() -> usize {
    16
}

fn seminorms(p: SeminormParams, seed: u64, tl: bool) -> Result<ExperimentReport> {
    let name = if tl { "tl_seminorm" } else { "besov_seminorm" };
    let spec = GridSpec::covering(&p.lo, &p.hi, p.h)?;
    let f: GridFunction = p.bump.sample(&spec)?;
    let sampler = AnnulusSampler::new(spec.dim(), p.n_radial, p.n_angular, seed)?;
    let mut rep = ExperimentReport::new(name, seed);
    rep.param("bump", &p.bump).param("h", p.h).param("lo", &p.lo).param("hi", &p.hi).param("s", &p.s);
    rep.param("p", p.p).param("q", p.q).param("k_min", p.k_min).param("k_max", p.k_max);
    rep.param("n_radial", p.n_radial).param("n_angular", p.n_angular);
    if !tl {
        rep.param("r", p.r);
    }
    let mut table = Table::new(&["s", "p", "q", "k_min", "k_max", "value"]);
    for &s in &p.s {
        let v = if tl {
            tl_seminorm(&f, s, p.p, p.q, &sampler, (p.k_min, p.k_max))?
        } else {
            besov_seminorm(&f, s, p.p, p.q, p.r, (p.k_min, p.k_max), &sampler)?
        };
        table.push(&[s, p.p, p.q, p.k_min as f64, p.k_max as f64, v]);
        rep.metric(&format!("s_{s}"), v);
    }
    rep.table("seminorms", table);
    Ok(rep)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GradientParams {
    bumps: Vec<Bump>,
    h: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
    step: f64,
    max_steps: usize,
    samples: Vec<Vec<f64>>,
    #[serde(default)]
    axis: usize,
}

fn gradient(p: GradientParams, seed: u64) -> Result<ExperimentReport> {
    let spec = GridSpec::covering(&p.lo, &p.hi, p.h)?;
    let search = RectSearch::uniform(spec.dim(), p.step, p.max_steps)?;
    let mut rep = ExperimentReport::new("gradient_bound", seed);
    rep.param("bumps", &p.bumps).param("h", p.h).param("lo", &p.lo).param("hi", &p.hi);
    rep.param("search", &search).param("samples", &p.samples).param("axis", p.axis);
    let bound = pointwise_gradient_bound_check(&p.bumps, &spec, &p.samples, p.axis, &search)?;
    let mut table = Table::new(&["sample", "ratio", "finite_difference", "formula", "residual"]);
    let mut skipped = 0usize;
    for (i, x) in p.samples.iter().enumerate() {
        let (fd, formula, residual) = match derivative_formula_check(&p.bumps, &spec, x, p.axis, &search)? {
            DerivativeOutcome::Checked { finite_difference, formula, residual, .. } => (finite_difference, formula, residual),
            DerivativeOutcome::Skipped { .. } => {
                skipped += 1;
                (f64::NAN, f64::NAN, f64::NAN)
            }
        };
        table.push(&[i as f64, bound.ratios[i], fd, formula, residual]);
    }
    rep.metric("max_ratio", bound.max_ratio).metric("derivative_skipped", skipped as f64);
    rep.table("samples", table);
    Ok(rep)
}
