//! Unimodular lattice bases, diagonal flows, basis reduction and exact point
//! enumeration inside a bounded region.

mod basis;
mod enumerate;
mod reduce;

pub use basis::{DiagonalFlow, LatticeBasis, LatticePoint};
pub use enumerate::{count_points, enumerate_points, EnumerateOptions};
pub use reduce::reduce_basis;

use crate::geometry::{PRegion, Region};
use crate::Result;

/// gcd of the absolute values of a nonzero integer vector.
pub fn is_primitive(coeffs: &[i64]) -> Result<bool> {
    if coeffs.iter().all(|&k| k == 0) {
        return Err(crate::Error::ZeroVector);
    }
    let mut g: u64 = 0;
    for &k in coeffs {
        g = gcd(g, k.unsigned_abs());
    }
    Ok(g == 1)
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Counts of a lattice against the dyadic-in-`N` slab family: the height band
/// `(1, T^N]` is the disjoint union of the flow preimages of `(1, T]`, so the
/// per-slab counts must sum to the direct count in the taller region, exactly.
pub fn slab_count_identity(
    basis: &LatticeBasis,
    t: f64,
    c: f64,
    n_slabs: u32,
) -> Result<(Vec<usize>, usize)> {
    assert!(n_slabs >= 1);
    let d = basis.dim();
    let s = t.ln() / (d - 1) as f64;
    let opts = EnumerateOptions::default();
    let mut per_slab = Vec::with_capacity(n_slabs as usize);
    for k in 0..n_slabs {
        let flow = DiagonalFlow::spiralling(d, k as f64 * s)?;
        let flowed = flow.apply(basis)?;
        let region = Region::p(PRegion::new(d, c, t)?);
        per_slab.push(enumerate_points(&flowed, &region, &opts)?.len());
    }
    let tall = Region::p(PRegion::new(d, c, t.powi(n_slabs as i32))?);
    let total = enumerate_points(basis, &tall, &opts)?.len();
    Ok((per_slab, total))
}
