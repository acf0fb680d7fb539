use proptest::prelude::*;

use strongmax::continuum::{
    cont_strong_max, iterated_1d_domination, truncated_strong_max, u_eval, AnnulusSampler, GridFunction, GridSpec,
    RectParams, RectSearch, Stratum,
};

const H: f64 = 0.25;

/// Nonnegative samples on an 8 x 8 grid over `[-1, 1]^2`.
fn grid2() -> impl Strategy<Value = GridFunction> {
    prop::collection::vec(0.0f64..4.0, 64)
        .prop_map(|v| GridFunction::new(GridSpec::new(vec![-1.0, -1.0], H, vec![8, 8]).unwrap(), v).unwrap())
}

/// A cell center of the 8 x 8 grid.
fn center() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0usize..8).prop_map(|i| -1.0 + (i as f64 + 0.5) * H), 2)
}

fn extents() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0usize..=6).prop_map(|k| k as f64 * H / 2.0), 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn strata_agree_at_their_boundaries(fs in prop::collection::vec(grid2(), 2), x in center(), lo in extents(), hi in extents(), axis in 0usize..2) {
        let other = 1 - axis;
        let mut lower = lo.clone();
        let mut upper = hi.clone();
        lower[axis] = lower[axis].max(H / 2.0);
        lower[other] = 0.0;
        upper[other] = 0.0;
        let seg = RectParams::new(lower.clone(), upper.clone()).unwrap();
        prop_assert_eq!(seg.stratum(), Stratum::Segment(axis));
        // a rectangle thin enough to stay inside the row of cells through x
        let eps = 1e-4 * H;
        lower[other] = eps;
        upper[other] = eps;
        let thin = RectParams::new(lower, upper).unwrap();
        prop_assert_eq!(thin.stratum(), Stratum::Full);
        let (a, b) = (u_eval(&x, &fs, &seg).unwrap(), u_eval(&x, &fs, &thin).unwrap());
        prop_assert!((a - b).abs() <= 1e-6 * a.max(1.0), "segment {} thin {}", a, b);

        let origin = u_eval(&x, &fs, &RectParams::zero(2)).unwrap();
        let pointwise: f64 = fs.iter().map(|f| f.value_at(&x)).product();
        prop_assert_eq!(origin, pointwise);
        let tiny = RectParams::new(vec![eps, eps], vec![eps, eps]).unwrap();
        let near = u_eval(&x, &fs, &tiny).unwrap();
        prop_assert!((near - origin).abs() <= 1e-6 * origin.max(1.0));
    }

    #[test]
    fn refinement_never_lowers_the_maximum(fs in prop::collection::vec(grid2(), 2), x in center()) {
        let coarse = RectSearch::uniform(2, 2.0 * H, 3).unwrap();
        let a = cont_strong_max(&x, &fs, &coarse).unwrap().0;
        let b = cont_strong_max(&x, &fs, &coarse.refined()).unwrap().0;
        prop_assert!(b >= a);
    }

    #[test]
    fn truncation_never_raises_the_maximum(fs in prop::collection::vec(grid2(), 2), x in center(), k in 1usize..4) {
        let search = RectSearch::uniform(2, H, 5).unwrap();
        let full = cont_strong_max(&x, &fs, &search).unwrap().0;
        let eps = vec![k as f64 * H; 2];
        prop_assert!(truncated_strong_max(&x, &fs, &eps, &search).unwrap() <= full);
    }

    #[test]
    fn strong_operator_is_dominated_by_iterated_one_dimensional_operators(f in grid2(), xs in prop::collection::vec(center(), 1..4)) {
        let search = RectSearch::uniform(2, H, 4).unwrap();
        let slack = iterated_1d_domination(&f, &xs, &search).unwrap();
        prop_assert!(slack <= 1e-12, "slack {}", slack);
    }

    #[test]
    fn annulus_sampler_is_deterministic(seed in any::<u64>(), nr in 1usize..6, na in 1usize..12) {
        let a = AnnulusSampler::new(2, nr, na, seed).unwrap();
        let b = AnnulusSampler::new(2, nr, na, seed).unwrap();
        prop_assert_eq!(&a.nodes, &b.nodes);
        prop_assert_eq!(&a.weights, &b.weights);
        prop_assert!((a.measure() - 0.75 * std::f64::consts::PI).abs() <= 1e-12);
        for node in &a.nodes {
            let rho = node.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!(rho > 0.5 && rho <= 1.0 + 1e-15);
        }
    }
}
