//! Enumeration of Dirichlet approximates of a real vector and spiralling
//! direction statistics.
//!
//! A pair `(p, q)` approximates `x` when `||q x - p|| < c q^{-1/d}` with
//! `1 <= q <= T`; pairs are counted with multiplicity in `(p, q)`, with an
//! optional coprimality filter for the primitive statistic.

use serde::Serialize;

use crate::geometry::{direction, unit_ball_volume, SphericalCap};
use crate::lattice::gcd;
use crate::{Error, Result};

/// One Dirichlet approximate of `x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproximatePair {
    pub p: Vec<i64>,
    pub q: u64,
    /// Error vector `q x - p`.
    pub err: Vec<f64>,
    /// Unit direction of the error; `None` for exact approximates.
    pub dir: Option<Vec<f64>>,
    pub err_norm: f64,
}

#[derive(Clone, Debug, Default)]
pub struct ApproximateOptions {
    /// Keep only pairs with gcd(p, q) = 1.
    pub coprime: bool,
}

/// All approximates of `x` with `1 <= q <= T`, sorted by `q` and then by `p`.
///
/// Candidate numerators are searched in an integer box of radius
/// `ceil(c q^{-1/d}) + 1` around the rounded point `q x`, which is complete
/// for any `c` and collapses to the single rounded candidate when `c < 1/2`.
pub fn enumerate_approximates(
    x: &[f64],
    c: f64,
    t: f64,
    opts: &ApproximateOptions,
) -> Result<Vec<ApproximatePair>> {
    if x.is_empty() || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("x must be a nonempty finite vector".into()));
    }
    if !(c > 0.0) {
        return Err(Error::Domain(format!("need c > 0, got {c}")));
    }
    let d = x.len();
    let mut out = Vec::new();
    if t < 1.0 {
        return Ok(out);
    }
    let q_max = t.floor() as u64;
    let mut p = vec![0i64; d];
    for q in 1..=q_max {
        let bound = c * (q as f64).powf(-1.0 / d as f64);
        let radius = bound.ceil() as i64 + 1;
        let base: Vec<i64> = x.iter().map(|&xi| (q as f64 * xi).round() as i64).collect();
        // Walk the candidate box around the rounded point.
        let mut offs = vec![-radius; d];
        'box_walk: loop {
            for i in 0..d {
                p[i] = base[i] + offs[i];
            }
            let err: Vec<f64> =
                (0..d).map(|i| q as f64 * x[i] - p[i] as f64).collect();
            let err_norm = err.iter().map(|e| e * e).sum::<f64>().sqrt();
            if err_norm < bound {
                let coprime_ok = !opts.coprime || {
                    let mut g = q;
                    for &pi in &p {
                        g = gcd(g, pi.unsigned_abs());
                    }
                    g == 1
                };
                if coprime_ok {
                    let dir = direction(&err).ok();
                    out.push(ApproximatePair { p: p.clone(), q, err, dir, err_norm });
                }
            }
            let mut i = 0;
            loop {
                offs[i] += 1;
                if offs[i] <= radius {
                    break;
                }
                offs[i] = -radius;
                i += 1;
                if i == d {
                    break 'box_walk;
                }
            }
        }
    }
    out.sort_by(|a, b| a.q.cmp(&b.q).then_with(|| a.p.cmp(&b.p)));
    Ok(out)
}

/// Direction statistics of the approximates of `x` against a cap.
#[derive(Clone, Debug, Serialize)]
pub struct SpirallingCounts {
    pub n_total: usize,
    pub n_in_cap: usize,
    /// `None` when no approximate has a defined direction.
    pub ratio: Option<f64>,
    /// Exact approximates (zero error), excluded from the denominator.
    pub n_exact: usize,
}

/// Counts approximates whose direction lies in the cap. Exact approximates
/// have no direction; they are excluded from both counts and reported aside.
pub fn spiralling_counts(
    x: &[f64],
    c: f64,
    t: f64,
    cap: &SphericalCap,
    opts: &ApproximateOptions,
) -> Result<SpirallingCounts> {
    if cap.d_sphere() != x.len() - 1 {
        return Err(Error::DimensionMismatch { expected: x.len() - 1, got: cap.d_sphere() });
    }
    let pairs = enumerate_approximates(x, c, t, opts)?;
    let mut n_total = 0usize;
    let mut n_in_cap = 0usize;
    let mut n_exact = 0usize;
    for pair in &pairs {
        match &pair.dir {
            None => n_exact += 1,
            Some(dir) => {
                n_total += 1;
                if cap.contains(dir) {
                    n_in_cap += 1;
                }
            }
        }
    }
    let ratio = if n_total > 0 { Some(n_in_cap as f64 / n_total as f64) } else { None };
    Ok(SpirallingCounts { n_total, n_in_cap, ratio, n_exact })
}

/// One row of a counting experiment.
#[derive(Clone, Debug, Serialize)]
pub struct CountRow {
    pub t: f64,
    pub count: usize,
    pub target: f64,
    pub residual: f64,
    /// Exact approximates seen up to this T (degenerate, rational-direction mass).
    pub n_exact: usize,
}

/// Approximate counts along an increasing `T` grid, extending one enumeration
/// instead of recounting. The target is the region volume
/// `c^d B_d log T` for `x` in `R^d`.
pub fn counting_series(
    x: &[f64],
    c: f64,
    t_grid: &[f64],
    opts: &ApproximateOptions,
) -> Result<Vec<CountRow>> {
    if t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("T grid must be strictly increasing".into()));
    }
    let d = x.len();
    let t_max = *t_grid.last().ok_or(Error::EmptySeries)?;
    let pairs = enumerate_approximates(x, c, t_max, opts)?;
    let ball = unit_ball_volume(d);
    let mut out = Vec::with_capacity(t_grid.len());
    let mut idx = 0usize;
    let mut count = 0usize;
    let mut n_exact = 0usize;
    for &t in t_grid {
        while idx < pairs.len() && (pairs[idx].q as f64) <= t {
            count += 1;
            if pairs[idx].dir.is_none() {
                n_exact += 1;
            }
            idx += 1;
        }
        let target = c.powi(d as i32) * ball * t.ln();
        out.push(CountRow { t, count, target, residual: count as f64 - target, n_exact });
    }
    Ok(out)
}
