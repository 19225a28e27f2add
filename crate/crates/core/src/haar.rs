//! Exact invariant-measure sampling on the space of two-dimensional
//! unimodular lattices, Monte Carlo moment estimates of counting statistics,
//! and the closed-form moment calculators for higher dimensions.
//!
//! A two-dimensional unimodular lattice is determined by a point `z = u + iv`
//! of the modular fundamental domain (`|z| >= 1`, `|u| <= 1/2`) together with
//! a rotation; the invariant probability measure is the normalized hyperbolic
//! area `(3/pi) v^{-2} du dv` times the uniform circle. Sampling is exact:
//! `v` by inverse CDF of `v^{-2}` on `[sqrt(3)/2, inf)`, `u` uniform, reject
//! below the unit circle.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::geometry::Region;
use crate::lattice::{count_points, EnumerateOptions, LatticeBasis};
use crate::moment2d;
use crate::numtheory::{zeta, zeta2};
use crate::stats::Welford;
use crate::{Error, Result};

/// Lower edge of the fundamental domain strip, `sqrt(3)/2`.
pub const V_MIN: f64 = 0.866_025_403_784_438_6;

/// One exact draw from the invariant measure.
#[derive(Clone, Debug)]
pub struct HaarSample {
    pub u: f64,
    pub v: f64,
    pub theta: f64,
    pub basis: LatticeBasis,
}

/// Sampler with rejection bookkeeping.
#[derive(Debug)]
pub struct HaarSampler {
    rng: ChaCha8Rng,
    proposals: u64,
    accepts: u64,
}

impl HaarSampler {
    pub fn new(seed: u64) -> Self {
        HaarSampler { rng: ChaCha8Rng::seed_from_u64(seed), proposals: 0, accepts: 0 }
    }

    /// Independent stream for a worker index; streams never overlap.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        HaarSampler { rng, proposals: 0, accepts: 0 }
    }

    /// Observed acceptance rate of the strip proposal. The exact rate is the
    /// hyperbolic area pi/3 of the domain over 2/sqrt(3) of the strip,
    /// `pi sqrt(3)/6` (about 0.907).
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            f64::NAN
        } else {
            self.accepts as f64 / self.proposals as f64
        }
    }

    pub fn sample(&mut self) -> HaarSample {
        loop {
            self.proposals += 1;
            let v = V_MIN / (1.0 - self.rng.random::<f64>());
            let u = self.rng.random_range(-0.5..0.5);
            if u * u + v * v >= 1.0 {
                self.accepts += 1;
                let theta = self.rng.random_range(0.0..std::f64::consts::TAU);
                let (sin, cos) = theta.sin_cos();
                let rv = v.sqrt();
                // R(theta) * [[1, u], [0, v]] / sqrt(v)
                let cols = DMatrix::from_row_slice(
                    2,
                    2,
                    &[cos / rv, (cos * u - sin * v) / rv, sin / rv, (sin * u + cos * v) / rv],
                );
                let basis = LatticeBasis::new(cols).expect("construction is unimodular");
                return HaarSample { u, v, theta, basis };
            }
        }
    }
}

/// Analytic CDF of the `v` marginal, for distribution tests.
pub fn v_marginal_cdf(v: f64) -> f64 {
    use std::f64::consts::PI;
    if v <= V_MIN {
        0.0
    } else if v <= 1.0 {
        (3.0 / PI)
            * ((-1.0 / v + 2.0 * (1.0 - v * v).sqrt() / v + 2.0 * v.asin()) - 2.0 * PI / 3.0)
    } else {
        1.0 - 3.0 / (PI * v)
    }
}

/// Number of nonzero (or primitive) lattice points inside the region.
pub fn siegel_value(basis: &LatticeBasis, region: &Region, primitive: bool) -> Result<usize> {
    count_points(basis, region, &EnumerateOptions { primitive_only: primitive })
}

/// A Monte Carlo moment estimate over the invariant measure.
#[derive(Clone, Debug, Serialize)]
pub struct MomentEstimate {
    /// Which moment `estimate` carries (1 or 2).
    pub moment: u8,
    pub estimate: f64,
    pub std_error: f64,
    /// First and second sample moments from the same run.
    pub mean: f64,
    pub second_moment: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub target: Option<f64>,
    pub z_score: Option<f64>,
    pub acceptance_rate: f64,
}

fn mc_run(
    region: &Region,
    primitive: bool,
    n_samples: u64,
    seed: u64,
    workers: usize,
) -> Result<(Welford, Welford, f64)> {
    if n_samples < 100 {
        return Err(Error::Domain("need at least 100 samples".into()));
    }
    if region.dim() != 2 {
        return Err(Error::Domain("exact invariant sampling exists only in dimension 2".into()));
    }
    let workers = workers.clamp(1, n_samples as usize);
    let chunk = n_samples.div_ceil(workers as u64);
    let mut parts: Vec<Result<(Welford, Welford, u64, u64)>> = Vec::new();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers {
            let lo = w as u64 * chunk;
            let hi = ((w as u64 + 1) * chunk).min(n_samples);
            if lo >= hi {
                break;
            }
            handles.push(scope.spawn(move || -> Result<(Welford, Welford, u64, u64)> {
                let mut sampler = HaarSampler::with_stream(seed, w as u64 + 1);
                let mut first = Welford::new();
                let mut second = Welford::new();
                for _ in lo..hi {
                    let s = sampler.sample();
                    let count = siegel_value(&s.basis, region, primitive)? as f64;
                    first.push(count);
                    second.push(count * count);
                }
                Ok((first, second, sampler.proposals, sampler.accepts))
            }));
        }
        for h in handles {
            parts.push(h.join().expect("worker panicked"));
        }
    });
    let mut first = Welford::new();
    let mut second = Welford::new();
    let mut proposals = 0u64;
    let mut accepts = 0u64;
    for part in parts {
        let (f, s, p, a) = part?;
        first.merge(&f);
        second.merge(&s);
        proposals += p;
        accepts += a;
    }
    Ok((first, second, accepts as f64 / proposals as f64))
}

/// Monte Carlo estimate of the mean count; the target is the region volume
/// (full) or volume over zeta(2) (primitive), by the mean value theorems.
pub fn mc_mean(
    region: &Region,
    primitive: bool,
    n_samples: u64,
    seed: u64,
    workers: usize,
) -> Result<MomentEstimate> {
    let (first, second, acc) = mc_run(region, primitive, n_samples, seed, workers)?;
    let target = if primitive { region.volume() / zeta2() } else { region.volume() };
    let se = first.std_error();
    Ok(MomentEstimate {
        moment: 1,
        estimate: first.mean(),
        std_error: se,
        mean: first.mean(),
        second_moment: second.mean(),
        n_samples,
        seed,
        target: Some(target),
        z_score: (se > 0.0).then(|| (first.mean() - target) / se),
        acceptance_rate: acc,
    })
}

/// Monte Carlo estimate of the second moment. For the primitive statistic
/// over an uncapped two-dimensional spiralling region the closed-form second
/// norm is attached as the target; otherwise the estimate is reported raw.
pub fn mc_second_moment(
    region: &Region,
    primitive: bool,
    n_samples: u64,
    seed: u64,
    workers: usize,
) -> Result<MomentEstimate> {
    let (first, second, acc) = mc_run(region, primitive, n_samples, seed, workers)?;
    let target = match region {
        Region::P { region: p, cap: None } if primitive && p.dim() == 2 => {
            Some(moment2d::ky_second_norm(p.c(), p.t(), false)?.ky_second_norm)
        }
        _ => None,
    };
    let se = second.std_error();
    Ok(MomentEstimate {
        moment: 2,
        estimate: second.mean(),
        std_error: se,
        mean: first.mean(),
        second_moment: second.mean(),
        n_samples,
        seed,
        target,
        z_score: target.and_then(|t| (se > 0.0).then(|| (second.mean() - t) / se)),
        acceptance_rate: acc,
    })
}

/// Second-moment upper bound for the full counting function in dimension at
/// least three: `vol^2 + 2 zeta(d/2)^2 vol`.
pub fn rogers_second_moment_bound(d: usize, vol: f64) -> Result<f64> {
    if d < 3 {
        return Err(Error::Domain(format!("bound requires d >= 3, got {d}")));
    }
    if vol < 0.0 {
        return Err(Error::Domain("volume must be nonnegative".into()));
    }
    let z = zeta(d as f64 / 2.0)?;
    Ok(vol * vol + 2.0 * z * z * vol)
}

/// Exact second moment of the primitive counting function in dimension at
/// least three: `(vol/zeta(d))^2 + vol/zeta(d) + overlap/zeta(d)`.
pub fn primitive_second_moment(d: usize, vol: f64, sym_overlap_vol: f64) -> Result<f64> {
    if d < 3 {
        return Err(Error::Domain(format!("formula requires d >= 3, got {d}")));
    }
    if vol < 0.0 || sym_overlap_vol < 0.0 || sym_overlap_vol > vol + 1e-12 {
        return Err(Error::Domain("need 0 <= overlap <= vol".into()));
    }
    let z = zeta(d as f64)?;
    Ok((vol / z) * (vol / z) + vol / z + sym_overlap_vol / z)
}

/// Exact second moment of the counting function over affine unimodular
/// lattices: `vol^2 + vol`.
pub fn affine_second_moment(vol: f64) -> f64 {
    vol * vol + vol
}
