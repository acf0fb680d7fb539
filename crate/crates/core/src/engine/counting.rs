use crate::error::{Error, Result};
use crate::numerics::two_sum;

// Beyond this the integers near `a ± r` stop being exactly representable.
const LIMIT: f64 = 4503599627370496.0; // 2^52

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("radius must be positive and finite, got {r}")))
    }
}

/// Exact test of `|k - a| < r`.
fn strictly_within(k: f64, a: f64, r: f64) -> bool {
    let (mut s, mut e) = two_sum(k, -a);
    if s < 0.0 {
        s = -s;
        e = -e;
    }
    s < r || (s == r && e < 0.0)
}

/// `g(a; r) = #{k ∈ ℤ : |k - a| < r}`.
pub fn lattice_count_g(a: f64, r: f64) -> Result<u64> {
    check_radius(r)?;
    if !a.is_finite() || a.abs() + r >= LIMIT {
        return Err(Error::InvalidParameter(format!("g({a}; {r}) outside the exact range")));
    }
    let mut lo = (a - r).floor() - 1.0;
    while !strictly_within(lo, a, r) && lo <= a {
        lo += 1.0;
    }
    let mut hi = (a + r).ceil() + 1.0;
    while !strictly_within(hi, a, r) && hi >= a {
        hi -= 1.0;
    }
    Ok(if hi >= lo { (hi - lo) as u64 + 1 } else { 0 })
}

/// `F(r) = 1` for `0 < r ≤ 3/2`, else `2⌊r - 3/2⌋ + 1`.
pub fn lattice_count_floor_f(r: f64) -> Result<u64> {
    check_radius(r)?;
    if r <= 1.5 {
        return Ok(1);
    }
    if r >= 2f64.powi(62) {
        return Err(Error::InvalidParameter(format!("F({r}) overflows")));
    }
    // r - 1.5 is exact below 2^52; above, r is an integer and ⌊r - 1.5⌋ = r - 2.
    let fl = if r < LIMIT { (r - 1.5).floor() } else { r - 2.0 };
    Ok(2 * fl as u64 + 1)
}

/// `N(R) = ∏ g(x_i; r_i)` for the open rectangle `∏ (x_i - r_i, x_i + r_i)`.
pub fn rectangle_lattice_count(x: &[f64], r: &[f64]) -> Result<u64> {
    if x.len() != r.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: r.len() });
    }
    x.iter().zip(r).map(|(a, r)| lattice_count_g(*a, *r)).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_examples() {
        assert_eq!(lattice_count_g(0.0, 1.0).unwrap(), 1);
        assert_eq!(lattice_count_g(0.5, 1.0).unwrap(), 2);
        assert_eq!(lattice_count_g(0.0, 2.5).unwrap(), 5);
        assert_eq!(lattice_count_g(0.5, 0.5).unwrap(), 0);
        assert_eq!(lattice_count_g(0.25, 0.5).unwrap(), 1);
        assert_eq!(lattice_count_g(-3.0, 0.001).unwrap(), 1);
        assert!(lattice_count_g(0.0, 0.0).is_err());
        assert!(lattice_count_g(0.0, -1.0).is_err());
    }

    #[test]
    fn g_boundary_uses_exact_difference() {
        // In exact arithmetic |1 - 0.1| < 0.9 although fl(1 - 0.1) == 0.9.
        assert_eq!(1.0 - 0.1, 0.9);
        assert_eq!(lattice_count_g(0.1, 0.9).unwrap(), 2);
        // |1 - 0.7| > 0.3 exactly, so no integer qualifies
        assert_eq!(lattice_count_g(0.7, 0.3).unwrap(), 0);
        assert_eq!(lattice_count_g(0.375, 1.625).unwrap(), 3);
    }

    #[test]
    fn f_examples() {
        assert_eq!(lattice_count_floor_f(1.0).unwrap(), 1);
        assert_eq!(lattice_count_floor_f(1.5).unwrap(), 1);
        assert_eq!(lattice_count_floor_f(1.6).unwrap(), 1);
        assert_eq!(lattice_count_floor_f(2.5).unwrap(), 3);
        assert_eq!(lattice_count_floor_f(2.6).unwrap(), 3);
        assert_eq!(lattice_count_floor_f(10.0).unwrap(), 17);
        assert_eq!(lattice_count_floor_f(2f64.powi(53)).unwrap(), 2u64.pow(54) - 3);
        assert!(lattice_count_floor_f(0.0).is_err());
        assert!(lattice_count_floor_f(f64::NAN).is_err());
    }

    #[test]
    fn rectangle_count() {
        assert_eq!(rectangle_lattice_count(&[0.0, 0.5], &[2.5, 1.0]).unwrap(), 10);
        assert!(rectangle_lattice_count(&[0.0], &[1.0, 1.0]).is_err());
    }
}
