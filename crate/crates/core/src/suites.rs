//! Seeded verification suites. Each check is a self-contained experiment that
//! returns an [`ExperimentReport`]; suites group them by module.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::continuum::{
    besov_boundedness_ratio, besov_seminorm, derivative_formula_check, iterated_1d_domination,
    pointwise_gradient_bound_check, tl_seminorm, translation_difference_check, truncated_lipschitz_check,
    AnnulusSampler, Bump, DerivativeOutcome, GridFunction, GridSpec, RectSearch,
};
use crate::engine::{
    hl_ball_max_point, lattice_count_floor_f, lattice_count_g, naive_strong_max_point, rectangle_lattice_count,
    strong_max_field, strong_max_point,
};
use crate::error::{Error, Result};
use crate::lattice::{lp_norm, sobolev_norm, IntegerBox, LatticeFunction, PrefixSumTable};
use crate::report::{ExperimentReport, Table};
use crate::seed::SeedTree;
use crate::variation::{
    continuity_experiment, delta_counterexample, delta_partial_variation_closed_form, difference_domination,
    random_origin, random_spikes, sharp_1d_centered, sharp_1d_uncentered, sharp_1d_uncentered_exact, thm17_ratio,
    CONTINUITY_MARGIN,
};

pub const SUITE_NAMES: [&str; 5] = ["lattice", "engine", "variation", "continuum", "all"];

type Check = fn(u64) -> Result<ExperimentReport>;

/// `(report name, check)` per suite, in run order.
pub fn suite_checks(suite: &str) -> Result<Vec<(&'static str, Check)>> {
    let lattice: Vec<(&'static str, Check)> =
        vec![("box_sum_oracle", box_sum_oracle), ("norm_bracketing", norm_bracketing), ("io_round_trip", io_round_trip)];
    let engine: Vec<(&'static str, Check)> = vec![
        ("closed_form_field", closed_form_field),
        ("oracle_equivalence", oracle_equivalence),
        ("counting_bounds", counting_bounds),
        ("ball_operator_line", ball_operator_line),
    ];
    let variation: Vec<(&'static str, Check)> = vec![
        ("unboundedness_witness", unboundedness_witness),
        ("sharp_uncentered", sharp_uncentered),
        ("sharp_centered", sharp_centered),
        ("variation_ratio_stability", variation_ratio_stability),
        ("difference_domination", difference_domination_check),
    ];
    let continuum: Vec<(&'static str, Check)> = vec![
        ("truncated_lipschitz", truncated_lipschitz),
        ("gradient_bound", gradient_bound),
        ("iterated_domination_and_seminorms", iterated_domination_and_seminorms),
        ("translation_difference", translation_difference),
    ];
    Ok(match suite {
        "lattice" => lattice,
        "engine" => engine,
        "variation" => variation,
        "continuum" => continuum,
        "all" => lattice.into_iter().chain(engine).chain(variation).chain(continuum).collect(),
        other => return Err(Error::InvalidParameter(format!("unknown suite {other:?}; expected one of {SUITE_NAMES:?}"))),
    })
}

pub fn run_suite(suite: &str, seed: u64) -> Result<Vec<ExperimentReport>> {
    suite_checks(suite)?.into_iter().map(|(_, check)| check(seed)).collect()
}

fn rng_for(seed: u64, name: &str) -> ChaCha8Rng {
    SeedTree::new(seed).child(name).rng()
}

fn random_signed(rng: &mut ChaCha8Rng, dim: usize) -> LatticeFunction {
    let origin = random_origin(rng, dim, 3);
    let shape: Vec<usize> = (0..dim).map(|_| rng.random_range(1..=5)).collect();
    let n: usize = shape.iter().product();
    let values = (0..n).map(|_| rng.random_range(-4i32..=4) as f64 * 0.25).collect();
    LatticeFunction::new(origin, shape, values).expect("valid shape")
}

fn random_box(rng: &mut ChaCha8Rng, dim: usize, spread: i64) -> IntegerBox {
    let lo: Vec<i64> = (0..dim).map(|_| rng.random_range(-spread..=spread)).collect();
    let hi = lo.iter().map(|l| l + rng.random_range(0..=spread)).collect();
    IntegerBox::new(lo, hi).expect("ordered corners")
}

fn random_inputs(rng: &mut ChaCha8Rng, dim: usize, m: usize, max_side: usize) -> Vec<LatticeFunction> {
    (0..m)
        .map(|_| {
            let side = rng.random_range(1..=max_side);
            let origin = random_origin(rng, dim, 3);
            random_spikes(rng, side, 5, &origin)
        })
        .collect()
}

/// Prefix-table box sums against direct summation.
pub fn box_sum_oracle(seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("box_sum_oracle", seed);
    let mut rng = rng_for(seed, "box_sum_oracle");
    let pairs = 1000;
    rep.param("pairs_per_dim", pairs);
    for dim in 1..=3 {
        let mut worst = 0.0f64;
        for _ in 0..pairs {
            let f = random_signed(&mut rng, dim);
            let t = PrefixSumTable::new(&f);
            let b = random_box(&mut rng, dim, 4);
            let direct: f64 = b.points().map(|n| f.get(&n).abs()).sum();
            worst = worst.max((t.box_sum(&b) - direct).abs());
        }
        rep.at_most(&format!("max_abs_error_d{dim}"), worst, 1e-12);
    }
    Ok(rep)
}

/// `‖f‖_p ≤ ‖f‖_{1,p} ≤ (2d+1)‖f‖_p` on random inputs.
pub fn norm_bracketing(seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("norm_bracketing", seed);
    let mut rng = rng_for(seed, "norm_bracketing");
    let trials = 300;
    rep.param("trials", trials).param("p", [1.0, 2.0, 3.5]);
    let mut violations = 0usize;
    for _ in 0..trials {
        let dim = rng.random_range(1..=3);
        let f = random_signed(&mut rng, dim);
        for p in [1.0, 2.0, 3.5] {
            let lp = lp_norm(&f, p)?;
            let w = sobolev_norm(&f, p)?;
            let tol = 1e-12 * w.max(1.0);
            if w < lp - tol || w > (2 * dim + 1) as f64 * lp + tol {
                violations += 1;
            }
        }
    }
    rep.at_most("violations", violations as f64, 0.0);
    Ok(rep)
}

/// JSON and sparse CSV reproduce random inputs exactly.
pub fn io_round_trip(seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("io_round_trip", seed);
    let mut rng = rng_for(seed, "io_round_trip");
    let trials = 200;
    rep.param("trials", trials);
    let mut mismatches = 0usize;
    for _ in 0..trials {
        let dim = rng.random_range(1..=3);
        let f = random_signed(&mut rng, dim).map(|v| v * std::f64::consts::PI);
        let back = LatticeFunction::from_json(&f.to_json())?;
        if back != f {
            mismatches += 1;
        }
        let sparse = LatticeFunction::read_sparse_csv(f.to_sparse_csv().as_bytes(), Some(dim))?;
        let same = f.iter().all(|(n, v)| sparse.get(&n) == v) && sparse.iter().all(|(n, v)| f.get(&n) == v);
        if !same {
            mismatches += 1;
        }
    }
    rep.at_most("mismatches", mismatches as f64, 0.0);
    Ok(rep)
}

/// The field of a unit spike is `∏ (|n_i| + 1)^{-1}`.
pub fn closed_form_field(seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("closed_form_field", seed);
    let radius = 20;
    rep.param("query_radius", radius);
    for dim in 1..=2 {
        let delta = LatticeFunction::delta(&vec![0; dim])?;
        let query = IntegerBox::centered_cube(dim, radius)?;
        let field = strong_max_field(&[delta], &query)?;
        let err = query
            .points()
            .map(|n| {
                let expect = 1.0 / n.iter().map(|v| (v.abs() + 1) as f64).product::<f64>();
                (field.values.get(&n) - expect).abs()
            })
            .fold(0.0, f64::max);
        rep.at_most(&format!("max_abs_error_d{dim}"), err, 1e-12);
    }
    Ok(rep)
}

/// Window-pruned evaluation against brute-force enumeration.
pub fn oracle_equivalence(seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("oracle_equivalence", seed);
    let instances = 500;
    rep.param("instances_per_case", instances).param("margins", [0, 1, 2, 3]);
    for dim in 1..=2 {
        for m in 1..=2 {
            let mut rng = rng_for(seed, &format!("oracle_equivalence/{dim}/{m}"));
            let mut mismatches = 0usize;
            for _ in 0..instances {
                let fs = random_inputs(&mut rng, dim, m, 4);
                let n: Vec<i64> = (0..dim).map(|_| rng.random_range(-7..=7)).collect();
                let (fast, _) = strong_max_point(&fs, &n)?;
                for margin in 0..=3 {
                    if naive_strong_max_point(&fs, &n, margin)? != fast {
                        mismatches += 1;
                    }
                }
            }
            rep.at_most(&format!("mismatches_d{dim}_m{m}"), mismatches as f64, 0.0);
        }
    }
    Ok(rep)
}

fn brute_interval_count(a64: i64, r64: i64) -> u64 {
    // integers k with |64k - a64| < r64
    let lo = (a64 - r64).div_euclid(64) - 1;
    let hi = (a64 + r64).div_euclid(64) + 1;
    (lo..=hi).filter(|k| (64 * k - a64).abs() < r64).count() as u64
}

/// `g(a; r) ≥ F(r)` and `N(R) ≥ ∏ F(r_i)` on dyadic data, with brute-force counts.
pub fn counting_bounds(seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("counting_bounds", seed);
    let mut rng = rng_for(seed, "counting_bounds");
    let samples = 1000;
    rep.param("samples", samples).param("resolution", 1.0 / 64.0);
    let (mut count_errors, mut g_violations, mut rect_violations) = (0usize, 0usize, 0usize);
    let mut drawn = 0;
    while drawn < samples {
        let dim = rng.random_range(1..=3usize);
        let a64: Vec<i64> = (0..dim).map(|_| rng.random_range(-640..=640)).collect();
        let r64: Vec<i64> = (0..dim).map(|_| rng.random_range(1..=1280)).collect();
        let brute: Vec<u64> = a64.iter().zip(&r64).map(|(a, r)| brute_interval_count(*a, *r)).collect();
        if brute.contains(&0) {
            continue;
        }
        drawn += 1;
        let a: Vec<f64> = a64.iter().map(|v| *v as f64 / 64.0).collect();
        let r: Vec<f64> = r64.iter().map(|v| *v as f64 / 64.0).collect();
        let mut floor_product = 1u64;
        for i in 0..dim {
            let g = lattice_count_g(a[i], r[i])?;
            let f = lattice_count_floor_f(r[i])?;
            count_errors += usize::from(g != brute[i]);
            g_violations += usize::from(g < f);
            floor_product *= f;
        }
        let n = rectangle_lattice_count(&a, &r)?;
        count_errors += usize::from(n != brute.iter().product::<u64>());
        rect_violations += usize::from(n < floor_product);
    }
    rep.at_most("count_mismatches", count_errors as f64, 0.0);
    rep.at_most("interval_violations", g_violations as f64, 0.0);
    rep.at_most("rectangle_violations", rect_violations as f64, 0.0);
    Ok(rep)
}

/// On the line, balls are intervals, so the ball operator equals the strong one.
pub fn ball_operator_line(seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("ball_operator_line", seed);
    let mut rng = rng_for(seed, "ball_operator_line");
    let trials = 100;
    rep.param("trials", trials);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let m = rng.random_range(1..=2);
        let fs = random_inputs(&mut rng, 1, m, 5);
        let n = [rng.random_range(-6..=6)];
        let strong = strong_max_point(&fs, &n)?.0;
        let ball = hl_ball_max_point(&fs, &n)?;
        worst = worst.max((strong - ball).abs() / strong.max(f64::MIN_POSITIVE));
    }
    rep.at_most("max_relative_gap", worst, 1e-12);
    Ok(rep)
}

/// Partial variation of the spike field on `[-N, N]^2` against its closed form.
pub fn unboundedness_witness(seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("unboundedness_witness", seed);
    let sizes = [8u64, 16, 32];
    rep.param("dim", 2).param("sizes", sizes);
    let mut table = Table::new(&["N", "S", "closed_form", "field_error"]);
    let mut s = Vec::new();
    for n in sizes {
        let (err, sn) = delta_counterexample(2, n)?;
        let closed = delta_partial_variation_closed_form(2, n);
        table.push(&[n as f64, sn, closed, err]);
        rep.at_most(&format!("field_error_N{n}"), err, 1e-12);
        rep.at_most(&format!("closed_form_gap_N{n}"), (sn - closed).abs(), 1e-9);
        s.push(sn);
    }
    rep.at_least("growth_S32_minus_S8", s[2] - s[0], 1.0);
    rep.table("partial_variation", table);
    Ok(rep)
}

/// `Var(Mδ) = 2 - 2/(N+1)` on `[-N, N]` and `Var(Mf) ≤ 2‖f‖₁`.
pub fn sharp_uncentered(seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("sharp_uncentered", seed);
    let delta = LatticeFunction::delta(&[0])?;
    for n in [10u64, 100] {
        let (var, _) = sharp_1d_uncentered(&delta, n)?;
        rep.at_most(&format!("delta_gap_N{n}"), (var - (2.0 - 2.0 / (n as f64 + 1.0))).abs(), 1e-12);
    }
    let mut rng = rng_for(seed, "sharp_uncentered");
    let trials = 1000;
    rep.param("trials", trials);
    let (mut violations, mut worst) = (0usize, 0.0f64);
    for _ in 0..trials {
        let side = rng.random_range(1..=12);
        let origin = random_origin(&mut rng, 1, 10);
        let f = random_spikes(&mut rng, side, 9, &origin);
        let (var, bound) = sharp_1d_uncentered_exact(&f)?;
        violations += usize::from(var > bound);
        worst = worst.max(var / bound);
    }
    rep.metric("max_ratio", worst);
    rep.at_most("violations", violations as f64, 0.0);
    Ok(rep)
}

/// `Var(M̃f) ≤ Var(f)` for the centered operator.
pub fn sharp_centered(seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("sharp_centered", seed);
    let mut rng = rng_for(seed, "sharp_centered");
    let trials = 1000;
    rep.param("trials", trials);
    let (mut violations, mut worst) = (0usize, 0.0f64);
    for _ in 0..trials {
        let side = rng.random_range(1..=12);
        let origin = random_origin(&mut rng, 1, 10);
        let f = random_spikes(&mut rng, side, 9, &origin);
        let (var_m, var_f) = sharp_1d_centered(&f)?;
        violations += usize::from(var_m > var_f);
        worst = worst.max(var_m / var_f);
    }
    rep.metric("max_ratio", worst);
    rep.at_most("violations", violations as f64, 0.0);
    Ok(rep)
}

/// Ratio of `‖∇𝕄(f⃗)‖₁` to the product-rule bound at two hull sizes, and
/// decay of the gradient error under shrinking perturbations.
pub fn variation_ratio_stability(seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("variation_ratio_stability", seed);
    let trials = 200;
    rep.param("dim", 2).param("m", 2).param("trials", trials).param("hull_sizes", [5, 9]);
    let mut maxima = Vec::new();
    let mut table = Table::new(&["hull_size", "trial", "ratio"]);
    let mut non_finite = 0usize;
    for size in [5usize, 9] {
        let mut rng = rng_for(seed, &format!("variation_ratio_stability/{size}"));
        let mut max = 0.0f64;
        for t in 0..trials {
            let fs: Vec<LatticeFunction> = (0..2)
                .map(|_| {
                    let origin = random_origin(&mut rng, 2, 4);
                    random_spikes(&mut rng, size, 9, &origin)
                })
                .collect();
            let trial = thm17_ratio(&fs)?;
            non_finite += usize::from(!trial.ratio.is_finite());
            max = max.max(trial.ratio);
            table.push(&[size as f64, t as f64, trial.ratio]);
        }
        rep.metric(&format!("max_ratio_size{size}"), max);
        maxima.push(max);
    }
    rep.at_most("non_finite_ratios", non_finite as f64, 0.0);
    rep.at_most("growth_factor", maxima[1] / maxima[0], 2.0);
    rep.table("ratios", table);

    let runs = 4;
    let steps = 12;
    rep.param("continuity_runs", runs).param("continuity_steps", steps).param("continuity_margin", CONTINUITY_MARGIN);
    let mut rng = rng_for(seed, "variation_ratio_stability/continuity");
    let mut worst = 0.0f64;
    for _ in 0..runs {
        let fs = random_inputs(&mut rng, 2, 2, 5);
        let hs: Vec<LatticeFunction> = fs
            .iter()
            .map(|f| {
                let origin = random_origin(&mut rng, 2, 4);
                let h = random_spikes(&mut rng, 3, 9, &origin);
                let scale = rng.random_range(0.1..=1.0) * f.l1_norm() / h.l1_norm();
                h.scaled(scale)
            })
            .collect();
        let run = continuity_experiment(&fs, &hs, steps, CONTINUITY_MARGIN)?;
        let (first, last) = (run.errors[0], run.errors[steps as usize - 1]);
        worst = worst.max(if first > 0.0 { last / first } else { 0.0 });
    }
    rep.at_most("continuity_last_over_first", worst, 0.01);
    Ok(rep)
}

/// `|𝕄(f⃗) - 𝕄(g⃗)| ≤ Σ_μ 𝕄(F⃗_μ)` on a 15×15 query box.
pub fn difference_domination_check(seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("difference_domination", seed);
    let mut rng = rng_for(seed, "difference_domination");
    let pairs = 100;
    let query = IntegerBox::centered_cube(2, 7)?;
    rep.param("pairs", pairs).param("query", &query);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..pairs {
        let m = rng.random_range(1..=2);
        let fs = random_inputs(&mut rng, 2, m, 4);
        let gs = random_inputs(&mut rng, 2, m, 4);
        worst = worst.max(difference_domination(&fs, &gs, &query)?);
    }
    rep.at_most("max_slack", worst, 1e-12);
    Ok(rep)
}

fn gaussian_grid(spec: &GridSpec, center: &[f64], sigma: f64) -> Result<GridFunction> {
    Bump::gaussian(center, sigma).sample(spec)
}

/// `|M^ε(x) - M^ε(y)| ≤ 2md/ε₀^{md+1} ∏‖f_j‖₁ |x - y|` with `m = d = 2`.
pub fn truncated_lipschitz(seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("truncated_lipschitz", seed);
    let mut rng = rng_for(seed, "truncated_lipschitz");
    let h = 0.1;
    let spec = GridSpec::covering(&[-3.0, -3.0], &[3.0, 3.0], h)?;
    let fs = [gaussian_grid(&spec, &[0.0, 0.0], 0.6)?, gaussian_grid(&spec, &[0.5, -0.4], 0.9)?];
    let search = RectSearch::uniform(2, h, 10)?;
    let eps = [0.5, 0.5];
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..200)
        .map(|_| {
            let x: Vec<f64> = (0..2).map(|_| rng.random_range(-1.5..1.5)).collect();
            let y = x.iter().map(|v| v + rng.random_range(-0.5..0.5)).collect();
            (x, y)
        })
        .collect();
    rep.param("spacing", h).param("epsilon", eps).param("pairs", pairs.len()).param("search", &search);
    let r = truncated_lipschitz_check(&fs, &eps, &pairs, &search)?;
    rep.metric("constant", r.constant).metric("max_ratio", r.max_ratio);
    rep.at_most("violations", r.violations as f64, 0.0);
    Ok(rep)
}

/// Pointwise gradient bound stable under `h`-refinement, and the derivative
/// formula at the maximizer matching central differences.
pub fn gradient_bound(seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("gradient_bound", seed);
    let bumps = [Bump::gaussian(&[0.0, 0.0], 0.6), Bump::gaussian(&[0.5, -0.3], 0.8)];
    let step = 0.1;
    let search = RectSearch::uniform(2, step, 20)?;
    let samples = vec![vec![0.9, 0.35], vec![-0.7, 1.05], vec![1.3, -0.85], vec![-1.1, -0.6], vec![0.25, 1.45], vec![1.6, 0.95]];
    let spacings = [0.1, 0.05, 0.025];
    rep.param("bumps", &bumps).param("search", &search).param("samples", &samples).param("spacings", spacings);
    let mut maxima = Vec::new();
    let mut table = Table::new(&["h", "axis", "sample", "ratio"]);
    let (mut worst_excess, mut checked, mut skipped) = (f64::NEG_INFINITY, 0usize, 0usize);
    for h in spacings {
        let spec = GridSpec::covering(&[-4.0, -4.0], &[4.0, 4.0], h)?;
        let mut max = 0.0f64;
        for l in 0..2 {
            let r = pointwise_gradient_bound_check(&bumps, &spec, &samples, l, &search)?;
            for (i, v) in r.ratios.iter().enumerate() {
                table.push(&[h, l as f64, i as f64, *v]);
            }
            max = max.max(r.max_ratio);
            for x in &samples {
                match derivative_formula_check(&bumps, &spec, x, l, &search)? {
                    DerivativeOutcome::Checked { residual, .. } => {
                        checked += 1;
                        worst_excess = worst_excess.max(residual / (5.0 * (h + step)));
                    }
                    DerivativeOutcome::Skipped { .. } => skipped += 1,
                }
            }
        }
        rep.metric(&format!("max_ratio_h{h}"), max);
        maxima.push(max);
    }
    let spread = maxima.iter().cloned().fold(0.0, f64::max) / maxima.iter().cloned().fold(f64::INFINITY, f64::min);
    rep.at_most("ratio_spread", spread, 1.5);
    rep.metric("derivative_skipped", skipped as f64);
    rep.at_least("derivative_checked", checked as f64, 1.0);
    rep.at_most("residual_over_tolerance", worst_excess, 1.0);
    rep.table("ratios", table);
    Ok(rep)
}

/// Iterated one-dimensional domination, TL/Besov agreement at `p = q`, and
/// stability of the Besov boundedness ratio under grid refinement.
pub fn iterated_domination_and_seminorms(seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("iterated_domination_and_seminorms", seed);
    let mut rng = rng_for(seed, "iterated_domination_and_seminorms");
    let h = 0.1;
    let spec = GridSpec::covering(&[-2.0, -2.0], &[2.0, 2.0], h)?;
    let search = RectSearch::uniform(2, h, 12)?;
    let samples: Vec<Vec<f64>> = (0..8).map(|_| (0..2).map(|_| rng.random_range(-1.5..1.5)).collect()).collect();
    let noise: Vec<f64> = (0..spec.len()).map(|_| rng.random_range(0.0..1.0)).collect();
    let fixtures = [
        ("separable", GridFunction::from_fn(spec.clone(), |x| (-(x[0] * x[0])).exp() / (1.0 + x[1] * x[1]))?),
        ("box", Bump::mollified_box(&[-1.8, -1.8], &[1.8, 1.8], h).sample(&spec)?),
        ("noise", GridFunction::new(spec.clone(), noise)?),
    ];
    rep.param("spacing", h).param("search", &search).param("samples", &samples);
    let mut worst = f64::NEG_INFINITY;
    for (name, f) in &fixtures {
        let slack = iterated_1d_domination(f, &samples, &search)?;
        rep.metric(&format!("slack_{name}"), slack);
        worst = worst.max(slack);
    }
    rep.at_most("iterated_slack", worst, 1e-6);

    let sampler = AnnulusSampler::new(2, 2, 8, SeedTree::new(seed).child("annulus").seed())?;
    let (s, k_range) = (0.5, (0, 3));
    let bump = gaussian_grid(&spec, &[0.1, -0.2], 0.5)?;
    let mut gap = 0.0f64;
    for p in [1.0, 2.0, 3.0] {
        let b = besov_seminorm(&bump, s, p, p, 1.0, k_range, &sampler)?;
        let t = tl_seminorm(&bump, s, p, p, &sampler, k_range)?;
        gap = gap.max((b - t).abs());
    }
    rep.at_most("tl_besov_gap", gap, 1e-6);

    let ps = [2.0, 2.0];
    let q = 2.0;
    let field_search = RectSearch::uniform(2, 0.2, 6)?;
    rep.param("besov", serde_json::json!({"s": s, "p": ps, "q": q, "k_range": k_range, "field_search": field_search}));
    let mut ratios = Vec::new();
    let mut table = Table::new(&["h", "numerator", "denominator", "ratio"]);
    for (hh, margin) in [(0.1, 5usize), (0.05, 10)] {
        let grid = GridSpec::covering(&[-2.0, -2.0], &[2.0, 2.0], hh)?;
        let f = gaussian_grid(&grid, &[0.0, 0.0], 0.5)?;
        let r = besov_boundedness_ratio(&[f.clone(), f], s, &ps, q, k_range, &sampler, &field_search, margin)?;
        table.push(&[hh, r.numerator, r.denominator, r.ratio]);
        rep.metric(&format!("besov_ratio_h{hh}"), r.ratio);
        ratios.push(r.ratio);
    }
    rep.at_most("besov_ratio_spread", ratios[0].max(ratios[1]) / ratios[0].min(ratios[1]), 1.5);
    rep.table("besov_ratio", table);
    Ok(rep)
}

/// `|𝓜(f⃗)(x + t) - 𝓜(f⃗)(x)| ≤ Σ_i 𝓜(f⃗_t^i)(x)` for whole-cell shifts.
pub fn translation_difference(seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("translation_difference", seed);
    let mut rng = rng_for(seed, "translation_difference");
    let h = 0.1;
    let spec = GridSpec::covering(&[-2.0, -2.0], &[2.0, 2.0], h)?;
    let fs = [gaussian_grid(&spec, &[0.2, 0.0], 0.5)?, Bump::tent(&[-0.3, 0.4], 1.2).sample(&spec)?];
    let search = RectSearch::uniform(2, 0.2, 6)?;
    let samples: Vec<Vec<f64>> = (0..10).map(|_| (0..2).map(|_| rng.random_range(-1.5..1.5)).collect()).collect();
    let shifts = [[1i64, 0], [0, -2], [3, 2]];
    rep.param("spacing", h).param("search", &search).param("shifts", shifts);
    let mut worst = f64::NEG_INFINITY;
    for t in shifts {
        worst = worst.max(translation_difference_check(&fs, &t, &samples, &search)?);
    }
    rep.at_most("max_slack", worst, 1e-12);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(suite_checks("nope").is_err());
        assert_eq!(suite_checks("all").unwrap().len(), 16);
    }

    #[test]
    fn lattice_suite_is_deterministic() {
        let a: Vec<String> = run_suite("lattice", 3).unwrap().iter().map(|r| r.to_json()).collect();
        let b: Vec<String> = run_suite("lattice", 3).unwrap().iter().map(|r| r.to_json()).collect();
        assert_eq!(a, b);
    }
}
