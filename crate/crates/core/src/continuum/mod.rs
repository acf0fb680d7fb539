//! Grid approximation of the continuous operator on ℝ and ℝ².
//!
//! Inputs are sampled at cell centers and read as piecewise constant, so every
//! rectangle integral is an exact midpoint sum. Candidate rectangles have
//! one-sided extents on a lattice of multiples of the grid spacing, so all
//! computed maxima approach the continuous supremum from below.

mod besov;
mod bumps;
pub mod checks;
mod grid;
mod operator;
mod params;

pub use besov::{
    besov_boundedness_ratio, besov_norm, besov_seminorm, clamp_k_range, tl_seminorm, AnnulusSampler,
    BoundednessRatio, KRange,
};
pub use bumps::Bump;
pub use checks::{
    derivative_formula_check, iterated_1d_domination, pointwise_gradient_bound_check, translation_difference_check,
    truncated_lipschitz_check, DerivativeOutcome, GradientBound, LipschitzReport,
};
pub use grid::{GridFunction, GridSpec};
pub use operator::{cont_strong_max, params_diameter, truncated_strong_max, u_eval, ProductInputs, RectSearch};
pub use params::{RectParams, Stratum};
