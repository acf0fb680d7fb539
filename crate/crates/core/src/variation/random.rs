use rand::Rng;

use crate::lattice::{IntegerBox, LatticeFunction};

/// Nonnegative integer spikes on the cube `[origin, origin + side - 1]`: each cell is
/// nonzero with probability 1/2, values in `1..=max_value`, at least one
/// nonzero cell. Integer data keeps every box sum exact in double precision.
pub fn random_spikes<R: Rng>(rng: &mut R, side: usize, max_value: u32, origin: &[i64]) -> LatticeFunction {
    let hull = IntegerBox::new(origin.to_vec(), origin.iter().map(|o| o + side as i64 - 1).collect())
        .expect("side >= 1");
    let mut values: Vec<f64> = (0..hull.count())
        .map(|_| if rng.random_bool(0.5) { rng.random_range(1..=max_value) as f64 } else { 0.0 })
        .collect();
    if values.iter().all(|v| *v == 0.0) {
        let i = rng.random_range(0..values.len());
        values[i] = rng.random_range(1..=max_value) as f64;
    }
    LatticeFunction::new(hull.lo().to_vec(), hull.extents(), values).expect("valid shape")
}

/// Random origin in `[-spread, spread]^d`.
pub fn random_origin<R: Rng>(rng: &mut R, dim: usize, spread: i64) -> Vec<i64> {
    (0..dim).map(|_| rng.random_range(-spread..=spread)).collect()
}
