use super::{objective_from_sums, union_support, validate_inputs};
use crate::error::{Error, Result};
use crate::lattice::{IntegerBox, LatticeFunction};

/// Rasterized ball maximal operator: open balls with centers in `½ℤ^d` inside
/// the bounding box of the support and `n`, squared radii `k/4` up to
/// `max(1, 4·diam²)`. A lower bound for the continuous-radius supremum in
/// `d ≥ 2`; exact (and equal to the strong operator) in `d = 1`.
///
/// Ball averages count every lattice point in the ball, inside or outside the
/// support.
pub fn hl_ball_max_point(fs: &[LatticeFunction], n: &[i64]) -> Result<f64> {
    let d = validate_inputs(fs)?;
    if n.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: n.len() });
    }
    let Some(support) = union_support(fs) else {
        return Ok(0.0);
    };
    let bbox = support.hull_with_point(n);
    let diam2: i64 = (0..d).map(|i| (bbox.hi()[i] - bbox.lo()[i]).pow(2)).sum();
    // Work in doubled coordinates: D = Σ (2k_i - c_i)^2 = 4|k - c/2|^2.
    let k_max = (4 * diam2).max(1);
    let reach = ((k_max - 1) as f64).sqrt().floor() as i64;
    let m = fs.len();

    let centers = IntegerBox::new(
        bbox.lo().iter().map(|v| 2 * v).collect(),
        bbox.hi().iter().map(|v| 2 * v).collect(),
    )?;
    let mut best = 0.0f64;
    let mut pts: Vec<(i64, Vec<f64>)> = Vec::new();
    for c in centers.points() {
        let dn: i64 = (0..d).map(|i| (2 * n[i] - c[i]).pow(2)).sum();
        if dn >= k_max {
            continue;
        }
        let scan = IntegerBox::new(
            c.iter().map(|v| (v - reach).div_euclid(2)).collect(),
            c.iter().map(|v| (v + reach).div_euclid(2) + 1).collect(),
        )?;
        pts.clear();
        for k in scan.points() {
            let dk: i64 = (0..d).map(|i| (2 * k[i] - c[i]).pow(2)).sum();
            if dk < k_max {
                pts.push((dk, fs.iter().map(|f| f.get(&k).abs()).collect()));
            }
        }
        pts.sort_by_key(|p| p.0);
        let mut sums = vec![0.0; m];
        let mut count = 0u64;
        let mut i = 0;
        while i < pts.len() {
            let level = pts[i].0;
            while i < pts.len() && pts[i].0 == level {
                for (s, v) in sums.iter_mut().zip(&pts[i].1) {
                    *s += v;
                }
                count += 1;
                i += 1;
            }
            if level >= dn {
                let prod: f64 = sums.iter().product();
                best = best.max(objective_from_sums(prod, count, m));
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::strong_max_point;

    #[test]
    fn coincides_with_strong_operator_in_one_dimension() {
        let d = LatticeFunction::delta(&[0]).unwrap();
        for n in -6..=6 {
            let v = hl_ball_max_point(std::slice::from_ref(&d), &[n]).unwrap();
            assert_eq!(v, 1.0 / (n.abs() as f64 + 1.0));
        }
        let f = LatticeFunction::from_slice_1d(-2, &[3.0, 0.0, 1.0, 5.0, 0.0, 2.0]).unwrap();
        let g = LatticeFunction::from_slice_1d(0, &[1.0, 4.0, 0.0, 1.0]).unwrap();
        for n in -5..=7 {
            for fs in [vec![f.clone()], vec![f.clone(), g.clone()]] {
                assert_eq!(hl_ball_max_point(&fs, &[n]).unwrap(), strong_max_point(&fs, &[n]).unwrap().0);
            }
        }
    }

    #[test]
    fn zero_input() {
        let z = LatticeFunction::from_slice_1d(0, &[0.0, 0.0]).unwrap();
        assert_eq!(hl_ball_max_point(&[z], &[1]).unwrap(), 0.0);
    }

    #[test]
    fn planar_spike_values() {
        // (1,0): the ball around (1/2,0) of radius just over 1/2 holds two points.
        let d = LatticeFunction::delta(&[0, 0]).unwrap();
        assert_eq!(hl_ball_max_point(std::slice::from_ref(&d), &[0, 0]).unwrap(), 1.0);
        assert_eq!(hl_ball_max_point(std::slice::from_ref(&d), &[1, 0]).unwrap(), 0.5);
        // (1,1): the smallest ball through both holds the unit square's corners.
        assert_eq!(hl_ball_max_point(&[d], &[1, 1]).unwrap(), 0.25);
    }
}
