use super::{IntegerBox, LatticeFunction};
use crate::error::{Error, Result};

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

/// `D_l f(n) = f(n + e_l) - f(n)` with a 0-based axis. The result hull is the
/// input hull grown by one cell toward `-e_l`.
pub fn discrete_partial(f: &LatticeFunction, l: usize) -> Result<LatticeFunction> {
    let d = f.dim();
    if l >= d {
        return Err(Error::InvalidAxis { axis: l, dim: d });
    }
    let mut lo = f.hull().lo().to_vec();
    lo[l] -= 1;
    let hull = IntegerBox::new(lo, f.hull().hi().to_vec())?;
    let mut shifted = vec![0i64; d];
    LatticeFunction::from_fn(&hull, |n| {
        shifted.copy_from_slice(n);
        shifted[l] += 1;
        f.get(&shifted) - f.get(n)
    })
}

/// `(Σ_n |f(n)|^p)^{1/p}`, or `max |f|` for `p = ∞`.
pub fn lp_norm(f: &LatticeFunction, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(lp_of(f.values().iter().copied(), p))
}

pub(crate) fn lp_of(values: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, |acc, v| acc.max(v.abs()))
    } else if p == 1.0 {
        values.map(f64::abs).sum()
    } else {
        values.map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// `‖∇f‖_p` taken coordinatewise: all partial differences pooled into one ℓ^p norm.
pub fn gradient_lp_norm(f: &LatticeFunction, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let mut all = Vec::new();
    for l in 0..f.dim() {
        all.extend_from_slice(discrete_partial(f, l)?.values());
    }
    Ok(lp_of(all.into_iter(), p))
}

/// `Var(f) = Σ_l Σ_n |D_l f(n)|`.
pub fn total_variation(f: &LatticeFunction) -> f64 {
    (0..f.dim())
        .map(|l| discrete_partial(f, l).map(|g| g.l1_norm()).unwrap_or(0.0))
        .sum()
}

/// `Σ_n |∇f(n)|_2`, the Euclidean-pointwise variant. Within a factor `√d` of
/// [`total_variation`].
pub fn total_variation_euclidean(f: &LatticeFunction) -> f64 {
    let d = f.dim();
    let grown = f.hull().expanded(1);
    let mut shifted = vec![0i64; d];
    grown
        .points()
        .map(|n| {
            let here = f.get(&n);
            let mut sq = 0.0;
            for l in 0..d {
                shifted.copy_from_slice(&n);
                shifted[l] += 1;
                let g = f.get(&shifted) - here;
                sq += g * g;
            }
            sq.sqrt()
        })
        .sum()
}

/// `‖f‖_{1,p} = ‖f‖_p + ‖∇f‖_p`.
pub fn sobolev_norm(f: &LatticeFunction, p: f64) -> Result<f64> {
    Ok(lp_norm(f, p)? + gradient_lp_norm(f, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta(at: &[i64]) -> LatticeFunction {
        LatticeFunction::delta(at).unwrap()
    }

    #[test]
    fn partial_of_spike() {
        let g = discrete_partial(&delta(&[0]), 0).unwrap();
        assert_eq!(g.get(&[-1]), 1.0);
        assert_eq!(g.get(&[0]), -1.0);
        assert_eq!(g.l1_norm(), 2.0);
    }

    #[test]
    fn partial_of_indicator() {
        let f = LatticeFunction::indicator(&IntegerBox::new(vec![0], vec![2]).unwrap());
        let g = discrete_partial(&f, 0).unwrap();
        let nonzero: Vec<_> = g.iter().filter(|(_, v)| *v != 0.0).collect();
        assert_eq!(nonzero, vec![(vec![-1], 1.0), (vec![2], -1.0)]);
    }

    #[test]
    fn partial_of_zero_and_bad_axis() {
        let z = LatticeFunction::zeros(&IntegerBox::new(vec![0, 0], vec![2, 2]).unwrap());
        assert!(discrete_partial(&z, 1).unwrap().is_zero());
        assert!(matches!(discrete_partial(&z, 2), Err(Error::InvalidAxis { .. })));
    }

    #[test]
    fn variation_examples() {
        assert_eq!(total_variation(&delta(&[0])), 2.0);
        assert_eq!(total_variation(&delta(&[0, 0])), 4.0);
        for n in [0, 1, 5, 40] {
            let f = LatticeFunction::indicator(&IntegerBox::new(vec![0], vec![n]).unwrap());
            assert_eq!(total_variation(&f), 2.0);
        }
        let e = total_variation_euclidean(&delta(&[0, 0]));
        assert!((e - (2.0 + 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn norm_examples() {
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert_eq!(lp_norm(&delta(&[3, -1]), p).unwrap(), 1.0);
        }
        let f = LatticeFunction::from_slice_1d(0, &[3.0, -4.0]).unwrap();
        assert_eq!(lp_norm(&f, 2.0).unwrap(), 5.0);
        assert_eq!(lp_norm(&f, f64::INFINITY).unwrap(), 4.0);
        assert!(matches!(lp_norm(&f, 0.5), Err(Error::InvalidExponent(_))));
        assert!(lp_norm(&f, f64::NAN).is_err());
        assert_eq!(sobolev_norm(&delta(&[0]), 1.0).unwrap(), 3.0);
        assert_eq!(sobolev_norm(&delta(&[0, 0]), 1.0).unwrap(), 5.0);
        assert!(sobolev_norm(&f, 0.0).is_err());
    }
}
