//! Counting regions and their exact volumes.
//!
//! Two region families are supported: the spiralling region (a shrinking tube
//! around the height axis, cut to a height band) and the linear-forms region.
//! Both have volume proportional to `log T`, which is what every counting
//! statistic in this crate is measured against.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::gamma;

use crate::{leq_tol, lt_tol, Error, Result};

/// Volume of the unit ball in `R^k` (`B_0 = 1`, `B_1 = 2`, `B_2 = pi`, ...).
pub fn unit_ball_volume(k: usize) -> f64 {
    let kf = k as f64;
    std::f64::consts::PI.powf(kf / 2.0) / gamma(kf / 2.0 + 1.0)
}

/// Surface measure of the unit sphere `S^{n-1}` in `R^n`, with the counting
/// measure convention `C_1 = 2` for the two-point sphere `S^0`.
pub fn sphere_surface(n: usize) -> f64 {
    let nf = n as f64;
    2.0 * std::f64::consts::PI.powf(nf / 2.0) / gamma(nf / 2.0)
}

/// Spiralling region: pairs `(v1, v2)` with `v1` in `R^{d-1}` and
/// `||v1||^{d-1} v2 <= c`, `1 < v2 <= T`. Boundary inequalities are
/// non-strict except the floor `v2 > 1`, which is strict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PRegionRaw", into = "PRegionRaw")]
pub struct PRegion {
    d: usize,
    t: f64,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct PRegionRaw {
    d: usize,
    #[serde(rename = "T")]
    t: f64,
    c: f64,
}

impl TryFrom<PRegionRaw> for PRegion {
    type Error = Error;
    fn try_from(raw: PRegionRaw) -> Result<PRegion> {
        PRegion::new(raw.d, raw.c, raw.t)
    }
}

impl From<PRegion> for PRegionRaw {
    fn from(r: PRegion) -> PRegionRaw {
        PRegionRaw { d: r.d, t: r.t, c: r.c }
    }
}

impl PRegion {
    pub fn new(d: usize, c: f64, t: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidRegion(format!("need d >= 2, got {d}")));
        }
        if !(t > 1.0) {
            return Err(Error::InvalidRegion(format!("need T > 1, got {t}")));
        }
        if !(c > 0.0) {
            return Err(Error::InvalidRegion(format!("need c > 0, got {c}")));
        }
        Ok(PRegion { d, t, c })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Exponent on `||v1||` in the membership predicate.
    pub fn norm_exponent(&self) -> u32 {
        (self.d - 1) as u32
    }

    /// Exact volume `c * B_{d-1} * log T`.
    pub fn volume(&self) -> f64 {
        self.c * unit_ball_volume(self.d - 1) * self.t.ln()
    }

    /// Membership of a point `v = (v1, v2)` of length `d`. The floor `v2 > 1`
    /// is strict (exclusion-zone tolerance); the ceiling and the product bound
    /// are non-strict (inclusion tolerance).
    pub fn contains(&self, v: &[f64]) -> bool {
        assert_eq!(v.len(), self.d);
        let v2 = v[self.d - 1];
        if !lt_tol(1.0, v2) || !leq_tol(v2, self.t) {
            return false;
        }
        let cross: f64 = v[..self.d - 1].iter().map(|x| x * x).sum::<f64>().sqrt();
        leq_tol(cross.powi(self.norm_exponent() as i32) * v2, self.c)
    }

    /// Largest possible `||v1||` once `v2 > h_min`.
    pub fn cross_radius(&self, h_min: f64) -> f64 {
        (self.c / h_min).powf(1.0 / (self.d - 1) as f64)
    }
}

/// Linear-forms region: pairs `(x, y)` in `R^m x R^n` with
/// `||x||^m ||y||^n <= c` and `1 <= ||y|| < T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RRegionRaw", into = "RRegionRaw")]
pub struct RRegion {
    m: usize,
    n: usize,
    t: f64,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct RRegionRaw {
    m: usize,
    n: usize,
    #[serde(rename = "T")]
    t: f64,
    c: f64,
}

impl TryFrom<RRegionRaw> for RRegion {
    type Error = Error;
    fn try_from(raw: RRegionRaw) -> Result<RRegion> {
        RRegion::new(raw.m, raw.n, raw.c, raw.t)
    }
}

impl From<RRegion> for RRegionRaw {
    fn from(r: RRegion) -> RRegionRaw {
        RRegionRaw { m: r.m, n: r.n, t: r.t, c: r.c }
    }
}

impl RRegion {
    pub fn new(m: usize, n: usize, c: f64, t: f64) -> Result<Self> {
        if m < 1 || n < 1 {
            return Err(Error::InvalidRegion(format!("need m, n >= 1, got ({m}, {n})")));
        }
        if !(t > 1.0) {
            return Err(Error::InvalidRegion(format!("need T > 1, got {t}")));
        }
        if !(c > 0.0) {
            return Err(Error::InvalidRegion(format!("need c > 0, got {c}")));
        }
        Ok(RRegion { m, n, t, c })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.m + self.n
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Exact volume `c * B_m * C_n * log T`.
    pub fn volume(&self) -> f64 {
        self.c * unit_ball_volume(self.m) * sphere_surface(self.n) * self.t.ln()
    }

    /// Membership: the floor `||y|| >= 1` is non-strict, the ceiling
    /// `||y|| < T` strict (exclusion-zone tolerance).
    pub fn contains(&self, v: &[f64]) -> bool {
        assert_eq!(v.len(), self.dim());
        let x_norm: f64 = v[..self.m].iter().map(|x| x * x).sum::<f64>().sqrt();
        let y_norm: f64 = v[self.m..].iter().map(|y| y * y).sum::<f64>().sqrt();
        if !leq_tol(1.0, y_norm) || !lt_tol(y_norm, self.t) {
            return false;
        }
        leq_tol(x_norm.powi(self.m as i32) * y_norm.powi(self.n as i32), self.c)
    }

    /// Largest possible `||x||` once `||y|| >= h_min`.
    pub fn cross_radius(&self, h_min: f64) -> f64 {
        (self.c / h_min.powi(self.n as i32)).powf(1.0 / self.m as f64)
    }
}

/// Either region family, as serialized in configs and result files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Region {
    #[serde(rename = "p")]
    P {
        #[serde(flatten)]
        region: PRegion,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cap: Option<SphericalCap>,
    },
    #[serde(rename = "r")]
    R {
        #[serde(flatten)]
        region: RRegion,
    },
}

impl Region {
    pub fn p(region: PRegion) -> Self {
        Region::P { region, cap: None }
    }

    pub fn r(region: RRegion) -> Self {
        Region::R { region }
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::P { region, .. } => region.dim(),
            Region::R { region } => region.dim(),
        }
    }

    /// Ambient volume, ignoring any cap restriction.
    pub fn volume(&self) -> f64 {
        match self {
            Region::P { region, .. } => region.volume(),
            Region::R { region } => region.volume(),
        }
    }

    /// Membership including the direction-cap restriction when present.
    pub fn contains(&self, v: &[f64]) -> bool {
        match self {
            Region::P { region, cap } => {
                if !region.contains(v) {
                    return false;
                }
                match cap {
                    None => true,
                    Some(cap) => {
                        let v1 = &v[..region.dim() - 1];
                        match direction(v1) {
                            Ok(dir) => cap.contains(&dir),
                            Err(_) => false, // direction undefined on the axis
                        }
                    }
                }
            }
            Region::R { region } => region.contains(v),
        }
    }

    pub(crate) fn t(&self) -> f64 {
        match self {
            Region::P { region, .. } => region.t(),
            Region::R { region } => region.t(),
        }
    }

    /// Number of leading "cross" coordinates (the `v1` resp. `x` block).
    pub(crate) fn cross_dim(&self) -> usize {
        match self {
            Region::P { region, .. } => region.dim() - 1,
            Region::R { region } => region.m(),
        }
    }

    pub(crate) fn cross_radius(&self, h_min: f64) -> f64 {
        match self {
            Region::P { region, .. } => region.cross_radius(h_min),
            Region::R { region } => region.cross_radius(h_min),
        }
    }

    /// Height of a point: the scalar `v2` for the spiralling family, the norm
    /// of the trailing block for the linear-forms family.
    pub(crate) fn height(&self, v: &[f64]) -> f64 {
        match self {
            Region::P { region, .. } => v[region.dim() - 1],
            Region::R { region } => {
                v[region.m()..].iter().map(|y| y * y).sum::<f64>().sqrt()
            }
        }
    }

    /// Whether heights live on the spiralling band `(1, T]` (true) or the
    /// linear-forms band `[1, T)` (false).
    pub(crate) fn height_band_open_below(&self) -> bool {
        matches!(self, Region::P { .. })
    }
}

/// Direction map: normalizes a nonzero error vector onto the unit sphere.
pub fn direction(err: &[f64]) -> Result<Vec<f64>> {
    let norm: f64 = err.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(err.iter().map(|x| x / norm).collect())
}

/// Shape of a spherical cap; the zero-dimensional sphere is an explicit
/// subset of its two points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CapShape {
    Angular { axis: Vec<f64>, angle: f64 },
    ZeroSphere { subset: Vec<i8> },
}

/// A cap on the sphere `S^{d_sphere}`, measured with the normalized surface
/// measure (the full sphere has measure 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SphericalCapRaw", into = "SphericalCapRaw")]
pub struct SphericalCap {
    d_sphere: usize,
    shape: CapShape,
}

#[derive(Serialize, Deserialize)]
struct SphericalCapRaw {
    d_sphere: usize,
    #[serde(flatten)]
    shape: CapShape,
}

impl TryFrom<SphericalCapRaw> for SphericalCap {
    type Error = Error;
    fn try_from(raw: SphericalCapRaw) -> Result<SphericalCap> {
        match raw.shape {
            CapShape::Angular { axis, angle } => SphericalCap::angular(axis, angle),
            CapShape::ZeroSphere { subset } => {
                let plus = subset.contains(&1);
                let minus = subset.contains(&-1);
                Ok(SphericalCap::zero_sphere(plus, minus))
            }
        }
    }
}

impl From<SphericalCap> for SphericalCapRaw {
    fn from(c: SphericalCap) -> SphericalCapRaw {
        SphericalCapRaw { d_sphere: c.d_sphere, shape: c.shape }
    }
}

impl SphericalCap {
    /// Cap of the given polar angle about a (normalized) axis on `S^{dim(axis)-1}`.
    pub fn angular(axis: Vec<f64>, angle: f64) -> Result<Self> {
        if axis.len() < 2 {
            return Err(Error::InvalidRegion(
                "angular caps need an axis in dimension >= 2; use zero_sphere for S^0".into(),
            ));
        }
        if !(0.0..=std::f64::consts::PI).contains(&angle) {
            return Err(Error::InvalidRegion(format!("cap angle {angle} outside [0, pi]")));
        }
        let axis = direction(&axis)?;
        Ok(SphericalCap { d_sphere: axis.len() - 1, shape: CapShape::Angular { axis, angle } })
    }

    /// Subset of the two-point sphere `S^0 = {-1, +1}`.
    pub fn zero_sphere(plus: bool, minus: bool) -> Self {
        let mut subset = Vec::new();
        if plus {
            subset.push(1);
        }
        if minus {
            subset.push(-1);
        }
        SphericalCap { d_sphere: 0, shape: CapShape::ZeroSphere { subset } }
    }

    /// The whole sphere.
    pub fn full(d_sphere: usize) -> Self {
        if d_sphere == 0 {
            SphericalCap::zero_sphere(true, true)
        } else {
            let mut axis = vec![0.0; d_sphere + 1];
            axis[0] = 1.0;
            SphericalCap {
                d_sphere,
                shape: CapShape::Angular { axis, angle: std::f64::consts::PI },
            }
        }
    }

    /// Upper hemisphere about the last coordinate axis (measure 1/2).
    pub fn hemisphere(d_sphere: usize) -> Self {
        if d_sphere == 0 {
            SphericalCap::zero_sphere(true, false)
        } else {
            let mut axis = vec![0.0; d_sphere + 1];
            axis[d_sphere] = 1.0;
            SphericalCap {
                d_sphere,
                shape: CapShape::Angular { axis, angle: std::f64::consts::FRAC_PI_2 },
            }
        }
    }

    pub fn d_sphere(&self) -> usize {
        self.d_sphere
    }

    /// Normalized surface measure, via the regularized incomplete beta
    /// function of the polar angle.
    pub fn measure(&self) -> f64 {
        match &self.shape {
            CapShape::ZeroSphere { subset } => subset.len() as f64 / 2.0,
            CapShape::Angular { angle, .. } => {
                let d = self.d_sphere as f64;
                if *angle <= 0.0 {
                    return 0.0;
                }
                if *angle >= std::f64::consts::PI {
                    return 1.0;
                }
                let half = |theta: f64| {
                    let s = theta.sin();
                    0.5 * beta_reg(d / 2.0, 0.5, s * s)
                };
                if *angle <= std::f64::consts::FRAC_PI_2 {
                    half(*angle)
                } else {
                    1.0 - half(std::f64::consts::PI - *angle)
                }
            }
        }
    }

    /// Complementary cap (opposite axis, supplementary angle).
    pub fn complement(&self) -> Self {
        match &self.shape {
            CapShape::ZeroSphere { subset } => {
                SphericalCap::zero_sphere(!subset.contains(&1), !subset.contains(&-1))
            }
            CapShape::Angular { axis, angle } => SphericalCap {
                d_sphere: self.d_sphere,
                shape: CapShape::Angular {
                    axis: axis.iter().map(|x| -x).collect(),
                    angle: std::f64::consts::PI - angle,
                },
            },
        }
    }

    /// Whether the unit vector `dir` lies in the cap. For `S^0` the input is a
    /// one-element slice whose sign selects the point.
    pub fn contains(&self, dir: &[f64]) -> bool {
        match &self.shape {
            CapShape::ZeroSphere { subset } => {
                let sign: i8 = if dir[0] > 0.0 { 1 } else { -1 };
                subset.contains(&sign)
            }
            CapShape::Angular { axis, angle } => {
                assert_eq!(dir.len(), axis.len());
                let dot: f64 = dir.iter().zip(axis).map(|(a, b)| a * b).sum();
                dot >= angle.cos() - 1e-15
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn ball_and_sphere_constants() {
        assert_abs_diff_eq!(unit_ball_volume(0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(unit_ball_volume(1), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(unit_ball_volume(2), std::f64::consts::PI, epsilon = 1e-13);
        assert_abs_diff_eq!(sphere_surface(1), 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(sphere_surface(2), 2.0 * std::f64::consts::PI, epsilon = 1e-13);
        assert_abs_diff_eq!(sphere_surface(3), 4.0 * std::f64::consts::PI, epsilon = 1e-13);
    }

    #[test]
    fn p_volume_examples() {
        // Degenerate height range: T -> 1+ collapses the volume.
        let r = PRegion::new(2, 1.0, 1.0 + 1e-15).unwrap();
        assert_abs_diff_eq!(r.volume(), 0.0, epsilon = 1e-12);
        // 1-D integral of 2c/y over (1, 10].
        let r = PRegion::new(2, 1.0, 10.0).unwrap();
        assert_abs_diff_eq!(r.volume(), 2.0 * 10f64.ln(), epsilon = 1e-12);
        // d = 3, T = e: integral of pi*c/y over (1, e].
        let r = PRegion::new(3, 1.0, std::f64::consts::E).unwrap();
        assert_abs_diff_eq!(r.volume(), std::f64::consts::PI, epsilon = 1e-12);
    }

    #[test]
    fn r_volume_examples() {
        let r = RRegion::new(1, 1, 1.0, std::f64::consts::E).unwrap();
        assert_abs_diff_eq!(r.volume(), 4.0, epsilon = 1e-12);
        let r = RRegion::new(2, 1, 1.0, 10.0).unwrap();
        assert_abs_diff_eq!(r.volume(), 2.0 * std::f64::consts::PI * 10f64.ln(), epsilon = 1e-12);
        assert!(RRegion::new(1, 1, 1.0, 1.0).is_err()); // T = 1 rejected
    }

    #[test]
    fn direction_examples() {
        assert_eq!(direction(&[3.0, 4.0]).unwrap(), vec![0.6, 0.8]);
        assert_eq!(direction(&[-0.5]).unwrap(), vec![-1.0]);
        assert!(direction(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn cap_measure_examples() {
        let full = SphericalCap::full(2);
        assert_abs_diff_eq!(full.measure(), 1.0, epsilon = 1e-14);
        let hemi = SphericalCap::hemisphere(1);
        assert_abs_diff_eq!(hemi.measure(), 0.5, epsilon = 1e-13);
        let plus = SphericalCap::zero_sphere(true, false);
        assert_abs_diff_eq!(plus.measure(), 0.5, epsilon = 0.0);
        // Circle cap of angle theta has measure theta/pi.
        let cap = SphericalCap::angular(vec![1.0, 0.0], 0.7).unwrap();
        assert_abs_diff_eq!(cap.measure(), 0.7 / std::f64::consts::PI, epsilon = 1e-12);
        // S^2 cap: (1 - cos theta)/2.
        let cap = SphericalCap::angular(vec![0.0, 0.0, 1.0], 1.1).unwrap();
        assert_abs_diff_eq!(cap.measure(), (1.0 - 1.1f64.cos()) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn cap_complement_sums_to_one() {
        for d in [1usize, 2, 3, 5] {
            for angle in [0.3, 1.0, std::f64::consts::FRAC_PI_2, 2.2, 3.0] {
                let mut axis = vec![0.0; d + 1];
                axis[0] = 0.6;
                axis[d] = -0.8;
                let cap = SphericalCap::angular(axis, angle).unwrap();
                let total = cap.measure() + cap.complement().measure();
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            }
        }
        let z = SphericalCap::zero_sphere(true, false);
        assert_abs_diff_eq!(z.measure() + z.complement().measure(), 1.0, epsilon = 0.0);
    }

    #[test]
    fn p_membership_is_the_two_dimensional_strip_when_d_is_2() {
        let r = PRegion::new(2, 1.5, 20.0).unwrap();
        for &(x, y) in &[(0.1, 2.0), (-0.7, 2.0), (0.0, 20.0), (0.5, 3.0)] {
            assert_eq!(r.contains(&[x, y]), (x as f64).abs() * y <= 1.5 && y > 1.0 && y <= 20.0);
        }
        assert!(!r.contains(&[0.0, 1.0])); // strict floor
        assert!(r.contains(&[0.0, 20.0])); // non-strict ceiling
        assert!(!r.contains(&[0.0, 20.0001]));
    }

    #[test]
    fn region_json_round_trip() {
        let p = Region::P {
            region: PRegion::new(3, 0.5, 100.0).unwrap(),
            cap: Some(SphericalCap::hemisphere(1)),
        };
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"kind\":\"p\""));
        let back: Region = serde_json::from_str(&s).unwrap();
        assert_eq!(p, back);

        let r = Region::r(RRegion::new(2, 1, 1.0, 10.0).unwrap());
        let s = serde_json::to_string(&r).unwrap();
        let back: Region = serde_json::from_str(&s).unwrap();
        assert_eq!(r, back);

        // Validation runs on deserialize.
        assert!(serde_json::from_str::<Region>(r#"{"kind":"p","d":1,"T":10.0,"c":1.0}"#).is_err());
        assert!(serde_json::from_str::<Region>(r#"{"kind":"p","d":2,"T":0.5,"c":1.0}"#).is_err());
    }

    #[test]
    fn monte_carlo_volume_agrees_with_closed_form() {
        use rand::{Rng, SeedableRng};
        // Uniform sampling over a bounding box; closed form must sit inside
        // three standard errors of the hit-fraction estimate.
        for &(d, c, t) in &[(2usize, 1.0, 10.0), (3, 1.0, 5.0), (4, 2.0, 8.0), (2, 0.5, 4.0)] {
            let region = PRegion::new(d, c, t).unwrap();
            let r1 = region.cross_radius(1.0);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7 + d as u64);
            let n = 200_000;
            let mut hits = 0u64;
            let box_vol = (2.0 * r1).powi((d - 1) as i32) * (t - 1.0);
            let mut v = vec![0.0; d];
            for _ in 0..n {
                for item in v.iter_mut().take(d - 1) {
                    *item = rng.random_range(-r1..r1);
                }
                v[d - 1] = rng.random_range(1.0..t);
                if region.contains(&v) {
                    hits += 1;
                }
            }
            let p = hits as f64 / n as f64;
            let est = box_vol * p;
            let se = box_vol * (p * (1.0 - p) / n as f64).sqrt();
            let err = (est - region.volume()).abs();
            assert!(
                err <= 3.0 * se,
                "d={d} c={c} T={t}: {est} vs {} (3se = {})",
                region.volume(),
                3.0 * se
            );
        }
    }

    proptest! {
        // Enlarging T or c never removes a member.
        #[test]
        fn membership_monotone_in_t_and_c(
            x in -2.0f64..2.0,
            y in 1.0f64..12.0,
            c in 0.2f64..2.0,
            t in 2.0f64..12.0,
            dc in 0.0f64..1.0,
            dt in 0.0f64..5.0,
        ) {
            let small = PRegion::new(2, c, t).unwrap();
            let big = PRegion::new(2, c + dc, t + dt).unwrap();
            if small.contains(&[x, y]) {
                prop_assert!(big.contains(&[x, y]));
            }
            let rs = RRegion::new(1, 1, c, t).unwrap();
            let rb = RRegion::new(1, 1, c + dc, t + dt).unwrap();
            if rs.contains(&[x, y]) {
                prop_assert!(rb.contains(&[x, y]));
            }
        }

        #[test]
        fn directions_have_unit_norm(v in proptest::collection::vec(-10.0f64..10.0, 1..5)) {
            let norm_sq: f64 = v.iter().map(|x| x * x).sum();
            prop_assume!(norm_sq > 1e-12);
            let dir = direction(&v).unwrap();
            let n: f64 = dir.iter().map(|x| x * x).sum();
            prop_assert!((n - 1.0).abs() < 1e-12);
        }
    }
}
