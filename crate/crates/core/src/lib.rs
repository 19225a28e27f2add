//! Counting of lattice points and Dirichlet approximates, with exact second-moment
//! formulas and Monte Carlo verification over the space of unimodular lattices.
//!
//! The crate is organised around a few cooperating modules:
//!
//! * [`geometry`] — the counting regions (spiralling and linear-forms families),
//!   their volumes, spherical caps and direction maps.
//! * [`lattice`] — unimodular lattice bases, diagonal flows, basis reduction and
//!   exact point enumeration inside a region.
//! * [`approximates`] — enumeration of Dirichlet approximates of a real vector and
//!   spiralling-direction statistics.
//! * [`haar`] — exact Haar sampling on the space of two-dimensional unimodular
//!   lattices and Monte Carlo moment estimates.
//! * [`moment2d`] — the closed-form second moment of the primitive counting
//!   function in dimension two (segment lengths, subregion integrals, power
//!   series, totient-weighted sums).
//! * [`numtheory`] — totient sieve, partial sums, Abel summation and the zeta
//!   function.
//! * [`harness`] — experiment orchestration, error-envelope fitting, reports.

pub mod approximates;
pub mod geometry;
pub mod haar;
pub mod harness;
pub mod lattice;
pub mod moment2d;
pub mod numtheory;
pub mod quad;
pub mod stats;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Relative tolerance used when evaluating region membership predicates at the
/// boundary. Boundaries are measure zero, so counts of generic lattices are
/// insensitive to this choice; integer lattices keep exact counts because the
/// slack is ~1e-12 while candidate points are O(1) apart.
pub const BOUNDARY_RELTOL: f64 = 1e-12;

/// `a <= b` up to [`BOUNDARY_RELTOL`] relative slack (non-strict bounds absorb
/// the tolerance inward).
#[inline]
pub(crate) fn leq_tol(a: f64, b: f64) -> bool {
    a <= b + BOUNDARY_RELTOL * b.abs().max(a.abs()).max(1.0)
}

/// `a < b` with an exclusion zone of [`BOUNDARY_RELTOL`] (strict bounds push
/// the tolerance outward, so a value within rounding noise of the boundary is
/// consistently excluded on every evaluation route).
#[inline]
pub(crate) fn lt_tol(a: f64, b: f64) -> bool {
    a < b - BOUNDARY_RELTOL * b.abs().max(a.abs()).max(1.0)
}
