//! Second moment of the primitive counting function over the two-dimensional
//! spiralling region.
//!
//! For a nonzero integer `n` and a region point `(x, y)`, the transversal line
//! `L(n, x, y, t) = (-ny/(x^2+y^2) + tx, nx/(x^2+y^2) + ty)` meets the region
//! in a union of at most two parameter intervals. This module computes that
//! segment length in closed form, integrates it exactly over the region for
//! each `n` (five subregion integrals with printed validity ranges), and
//! assembles the totient-weighted sum giving the closed-form second norm of
//! the primitive counting function, its centered version, and the power-series
//! expansions used to track the sum's growth.

mod integrals;
mod roots;
mod second_moment;
mod segment;
mod series;

pub use integrals::{
    closed_form_a, full_integral, full_integral_quadrature, region_area, IntegralBreakdown,
    Subregion, SubregionValue,
};
pub use roots::{roots_y, RootsY};
pub use second_moment::{
    centered_second_moment, ky_second_norm, phi_weighted_sum, CenteredSecondMoment,
    PhiWeightedSum, SecondMomentReport,
};
pub use segment::{classify_intersection, segment_length, IntersectionProfile, SegmentQuery};
pub use series::{series_eval, SeriesEval, SeriesExpansion, SeriesSpec, ALL_EXPANSIONS};

/// Largest `n` contributing a nonzero integral: `c T + c/T`.
pub fn n_truncation(c: f64, t: f64) -> f64 {
    c * t + c / t
}

/// Validity ceiling of the hyperbola-exit integral: `c (T^2 - 1)/T`.
pub fn n_y4_validity(c: f64, t: f64) -> f64 {
    c * (t * t - 1.0) / t
}
