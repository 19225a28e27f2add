use nalgebra::{DMatrix, DVector};

use crate::geometry::Region;
use crate::lattice::reduce::reduce_columns;
use crate::lattice::{is_primitive, LatticeBasis, LatticePoint};
use crate::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct EnumerateOptions {
    /// Keep only points whose coefficient gcd is 1 (homogeneous lattices only).
    pub primitive_only: bool,
}

/// Height band of one dyadic slab. Slabs partition the region's height range,
/// so every point is assigned to exactly one slab.
#[derive(Clone, Copy, Debug)]
struct Slab {
    lo: f64,
    hi: f64,
}

fn slabs(region: &Region) -> Vec<Slab> {
    let mut out = Vec::new();
    let mut hi = region.t();
    while hi > 1.0 {
        let lo = (hi / 2.0).max(1.0);
        out.push(Slab { lo, hi });
        hi = lo;
    }
    out
}

/// All lattice points of `basis` inside `region` (excluding the origin for
/// homogeneous lattices), found by covering each dyadic height slab with a box
/// and enumerating the box by Fincke–Pohst recursion on a re-reduced basis.
/// Every candidate is accepted or rejected by the exact region predicate.
pub fn enumerate_points(
    basis: &LatticeBasis,
    region: &Region,
    opts: &EnumerateOptions,
) -> Result<Vec<LatticePoint>> {
    let d = region.dim();
    if basis.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: basis.dim() });
    }
    if opts.primitive_only && basis.shift().is_some() {
        return Err(Error::Domain("primitivity is undefined for affine lattices".into()));
    }

    let reduction = reduce_columns(basis.columns())?;
    let cross_dim = region.cross_dim();
    let open_below = region.height_band_open_below();

    let mut found: Vec<LatticePoint> = Vec::new();
    for slab in slabs(region) {
        // Bounding box of the slab: cross block limited by the region at the
        // slab floor, height block limited by the slab ceiling.
        let r = region.cross_radius(slab.lo);
        let mut center = DVector::zeros(d);
        let mut half = DVector::zeros(d);
        for i in 0..cross_dim {
            center[i] = 0.0;
            half[i] = r;
        }
        if matches!(region, Region::P { .. }) {
            center[d - 1] = 0.5 * (slab.lo + slab.hi);
            half[d - 1] = 0.5 * (slab.hi - slab.lo);
        } else {
            for i in cross_dim..d {
                center[i] = 0.0;
                half[i] = slab.hi;
            }
        }
        if let Some(shift) = basis.shift() {
            center -= shift;
        }

        // Scale the box to a unit cube, re-reduce the scaled generators, and
        // enumerate the covering ball of squared radius d.
        let mut scaled = reduction.cols.clone();
        for i in 0..d {
            let s = 1.0 / half[i];
            for j in 0..d {
                scaled[(i, j)] *= s;
            }
        }
        let inner = reduce_columns(&scaled)?;
        let target = DVector::from_iterator(d, (0..d).map(|i| center[i] / half[i]));
        let z = inner
            .cols
            .clone()
            .lu()
            .solve(&target)
            .ok_or_else(|| Error::DegenerateBasis("singular scaled basis".into()))?;
        let gram = inner.cols.transpose() * &inner.cols;
        let chol = gram
            .cholesky()
            .ok_or_else(|| Error::DegenerateBasis("gram not positive definite".into()))?;
        let rmat = chol.l().transpose();
        let radius_sq = d as f64 * (1.0 + 1e-9) + 1e-9;

        ball_points(&rmat, &z, radius_sq, &mut |k_inner| {
            let k_mid = inner.to_original_coeffs(k_inner);
            let coeffs = reduction.to_original_coeffs(&k_mid);
            if basis.shift().is_none() && coeffs.iter().all(|&v| v == 0) {
                return;
            }
            let coords = basis.point(&coeffs);
            if !region.contains(&coords) {
                return;
            }
            // Assign to exactly one slab.
            let h = region.height(&coords);
            let in_band = if open_below {
                h > slab.lo && (h <= slab.hi || slab.hi == region.t())
            } else {
                (h >= slab.lo || slab.lo == 1.0) && h < slab.hi
            };
            // Top slab absorbs boundary-tolerance stragglers just above T; the
            // exact predicate has already vetted them.
            if !in_band {
                return;
            }
            let primitive =
                if basis.shift().is_none() { Some(is_primitive(&coeffs).unwrap()) } else { None };
            if opts.primitive_only && primitive != Some(true) {
                return;
            }
            found.push(LatticePoint { coeffs, coords, primitive });
        });
    }

    found.sort_by(|a, b| {
        region
            .height(&a.coords)
            .partial_cmp(&region.height(&b.coords))
            .unwrap()
            .then_with(|| a.coeffs.cmp(&b.coeffs))
    });
    Ok(found)
}

/// Count points without materializing them.
pub fn count_points(basis: &LatticeBasis, region: &Region, opts: &EnumerateOptions) -> Result<usize> {
    Ok(enumerate_points(basis, region, opts)?.len())
}

/// Fincke–Pohst recursion: visits every integer vector `k` with
/// `||R (k - z)||^2 <= radius_sq`, for upper-triangular `R`.
fn ball_points(r: &DMatrix<f64>, z: &DVector<f64>, radius_sq: f64, visit: &mut dyn FnMut(&[i64])) {
    let d = r.nrows();
    let mut k = vec![0i64; d];
    // offsets[i] = sum_{j>i} R_ij (k_j - z_j), maintained per level
    fn descend(
        r: &DMatrix<f64>,
        z: &DVector<f64>,
        level: usize,
        budget: f64,
        k: &mut Vec<i64>,
        visit: &mut dyn FnMut(&[i64]),
    ) {
        let rii = r[(level, level)];
        let mut offset = 0.0;
        for j in (level + 1)..r.nrows() {
            offset += r[(level, j)] * (k[j] as f64 - z[j]);
        }
        let s = budget.max(0.0).sqrt();
        let lo = (z[level] + (-s - offset) / rii).ceil() as i64;
        let hi = (z[level] + (s - offset) / rii).floor() as i64;
        for ki in lo..=hi {
            let term = rii * (ki as f64 - z[level]) + offset;
            let rem = budget - term * term;
            if rem < 0.0 {
                continue;
            }
            k[level] = ki;
            if level == 0 {
                visit(k);
            } else {
                descend(r, z, level - 1, rem, k, visit);
            }
        }
        k[level] = 0;
    }
    descend(r, z, d - 1, radius_sq, &mut k, visit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{PRegion, RRegion};
    use crate::lattice::DiagonalFlow;

    fn p_region(d: usize, c: f64, t: f64) -> Region {
        Region::p(PRegion::new(d, c, t).unwrap())
    }

    /// Brute force over a coefficient box, for cross-validation.
    fn brute_force(basis: &LatticeBasis, region: &Region, k_max: i64, primitive: bool) -> Vec<Vec<i64>> {
        let d = basis.dim();
        let mut out = Vec::new();
        let mut k = vec![-k_max; d];
        loop {
            if basis.shift().is_some() || k.iter().any(|&v| v != 0) {
                let coords = basis.point(&k);
                if region.contains(&coords)
                    && (!primitive || is_primitive(&k).unwrap_or(false))
                {
                    out.push(k.clone());
                }
            }
            // odometer
            let mut i = 0;
            loop {
                k[i] += 1;
                if k[i] <= k_max {
                    break;
                }
                k[i] = -k_max;
                i += 1;
                if i == d {
                    return out;
                }
            }
        }
    }

    #[test]
    fn integer_lattice_in_small_region() {
        let z2 = LatticeBasis::standard(2);
        let region = p_region(2, 1.0, 10.0);
        let pts = enumerate_points(&z2, &region, &EnumerateOptions::default()).unwrap();
        assert_eq!(pts.len(), 9);
        for p in &pts {
            assert_eq!(p.coords[0], 0.0);
            assert!(p.coords[1] >= 2.0 && p.coords[1] <= 10.0);
        }
        // Primitive filter empties it: gcd(0, y) = y >= 2.
        let prim = enumerate_points(
            &z2,
            &region,
            &EnumerateOptions { primitive_only: true },
        )
        .unwrap();
        assert!(prim.is_empty());
    }

    #[test]
    fn near_degenerate_height_range_is_empty() {
        let z2 = LatticeBasis::standard(2);
        let region = p_region(2, 1.0, 1.0 + 1e-9);
        assert!(enumerate_points(&z2, &region, &EnumerateOptions::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn agrees_with_brute_force_on_random_lattices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let x: f64 = rng.random_range(0.0..1.0);
            let c: f64 = rng.random_range(0.5..2.0);
            let t: f64 = rng.random_range(3.0..30.0);
            let basis = LatticeBasis::dani(&[x]).unwrap();
            let region = p_region(2, c, t);
            for primitive in [false, true] {
                let opts = EnumerateOptions { primitive_only: primitive };
                let got = enumerate_points(&basis, &region, &opts).unwrap();
                let want = brute_force(&basis, &region, 50, primitive);
                assert_eq!(got.len(), want.len(), "x={x} c={c} t={t} prim={primitive}");
            }
        }
    }

    #[test]
    fn agrees_with_brute_force_in_three_dimensions() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let x = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
            let basis = LatticeBasis::dani(&x).unwrap();
            let region = p_region(3, 1.5, 12.0);
            let got = enumerate_points(&basis, &region, &EnumerateOptions::default()).unwrap();
            let want = brute_force(&basis, &region, 14, false);
            assert_eq!(got.len(), want.len(), "x = {x:?}");
        }
    }

    #[test]
    fn r_region_and_affine_shift() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let m_entry: f64 = rng.random_range(-0.9..0.9);
            let basis = LatticeBasis::linear_forms(1, 1, &[m_entry]).unwrap();
            let region = Region::r(RRegion::new(1, 1, 1.2, 9.0).unwrap());
            let got = enumerate_points(&basis, &region, &EnumerateOptions::default()).unwrap();
            let want = brute_force(&basis, &region, 20, false);
            assert_eq!(got.len(), want.len(), "M = {m_entry}");

            // Affine case: shifted lattice, primitivity rejected.
            let shifted = LatticeBasis::linear_forms(1, 1, &[m_entry])
                .unwrap()
                .with_shift(vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)])
                .unwrap();
            let got = enumerate_points(&shifted, &region, &EnumerateOptions::default()).unwrap();
            let want = brute_force(&shifted, &region, 20, false);
            assert_eq!(got.len(), want.len());
            assert!(got.iter().all(|p| p.primitive.is_none()));
            assert!(enumerate_points(
                &shifted,
                &region,
                &EnumerateOptions { primitive_only: true }
            )
            .is_err());
        }
    }

    #[test]
    fn flow_equivariance_on_dyadic_bands() {
        // Counting the flowed lattice in P equals counting the original in the
        // preimage band, which is a difference of two P regions.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let t = 6.0f64;
        let s = t.ln();
        for _ in 0..10 {
            let basis = LatticeBasis::dani(&[rng.random_range(0.0..1.0)]).unwrap();
            for k in 1..=3u32 {
                let flow = DiagonalFlow::spiralling(2, k as f64 * s).unwrap();
                let flowed = flow.apply(&basis).unwrap();
                let direct =
                    count_points(&flowed, &p_region(2, 1.0, t), &EnumerateOptions::default())
                        .unwrap();
                let tall = count_points(
                    &basis,
                    &p_region(2, 1.0, t.powi(k as i32 + 1)),
                    &EnumerateOptions::default(),
                )
                .unwrap();
                let short = count_points(
                    &basis,
                    &p_region(2, 1.0, t.powi(k as i32)),
                    &EnumerateOptions::default(),
                )
                .unwrap();
                assert_eq!(direct, tall - short);
            }
        }
    }

    #[test]
    fn large_t_runs_fast_and_matches_sum_of_bands() {
        // Enumeration at T = 1e6 must stay proportional to the count, not the
        // box volume; the band decomposition cross-checks the total.
        let basis = LatticeBasis::dani(&[0.579_327_111]).unwrap();
        let opts = EnumerateOptions::default();
        let total = count_points(&basis, &p_region(2, 1.0, 1e6), &opts).unwrap();
        let mut banded = count_points(&basis, &p_region(2, 1.0, 10.0), &opts).unwrap();
        for k in 1..6 {
            let lo = 10f64.powi(k);
            let hi = 10f64.powi(k + 1);
            banded += count_points(&basis, &p_region(2, 1.0, hi), &opts).unwrap()
                - count_points(&basis, &p_region(2, 1.0, lo), &opts).unwrap();
        }
        assert_eq!(total, banded);
        assert!(total > 0);
    }
}
