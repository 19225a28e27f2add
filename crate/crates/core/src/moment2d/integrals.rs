//! Exact subregion integrals of the segment-length decomposition.
//!
//! The integral of the segment length over the region splits into five pieces,
//! one per crossing type, each of the form `∬ alpha(x, y)/y dx dy` over the
//! set where the line realizes that crossing:
//!
//! ```text
//! total = A_T + A_{y4} - A_{y3} + A_{y2} - A_1
//! ```
//!
//! Every inner integral has an elementary antiderivative: substituting
//! `u = sqrt(n^2 -+ 4xyc)` turns the `y2`/`y3`/`y4` integrands into
//! `n log(n ± u) -+ u`, and the boundary curves of each subregion
//! (`x = ±c/y`, `x = n - cy`, `x = (Tn -+ cy)/T^2`, `x = n^2/(4cy)`) evaluate
//! those antiderivatives to expressions of the form
//! `kappa + lambda log y + nu y + rho / y`. The outer integral is therefore
//! exact on every sub-interval between boundary-curve intersections; this
//! module assembles those pieces. Validity ranges: every subregion is empty
//! for `n > c(T^2+1)/T`, and the `y4` piece already for `n > c(T^2-1)/T`.

use serde::Serialize;

use crate::moment2d::segment::{segment_length, SegmentQuery};
use crate::moment2d::{n_truncation, n_y4_validity};
use crate::quad::adaptive_quad_split;
use crate::{Error, Result};

/// The five crossing-type subregions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Subregion {
    Floor,
    ExitY2,
    ReentryY3,
    ExitY4,
    Ceiling,
}

/// One subregion integral with its printed-validity flag. `value` is always
/// the exact integral (zero when the subregion is empty); `valid` is false
/// when `n` exceeds the subregion's validity range.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SubregionValue {
    pub value: f64,
    pub valid: bool,
}

/// The five signed pieces for one `n`, their total, and the excluded
/// out-of-validity `y4` term when `n` lies in the top band.
#[derive(Clone, Debug, Serialize)]
pub struct IntegralBreakdown {
    pub n: u64,
    pub a_1: SubregionValue,
    pub a_y2: SubregionValue,
    pub a_y3: SubregionValue,
    pub a_y4: SubregionValue,
    pub a_t: SubregionValue,
    pub total: f64,
    /// Value the `y4` closed form would contribute for
    /// `c(T^2-1)/T < n <= cT + c/T`; excluded exactly from `total`.
    pub eps_y4_excluded: Option<f64>,
}

/// Boundary evaluation of an inner antiderivative along one curve:
/// `kappa + lambda ln y + nu y + rho / y`.
#[derive(Clone, Copy, Debug, Default)]
struct Edge {
    k: f64,
    l: f64,
    v: f64,
    r: f64,
}

impl Edge {
    fn constant(k: f64) -> Edge {
        Edge { k, ..Default::default() }
    }
}

/// Exact value of `mult * ∫ (hi - lo)(y) / y dy` over `[y0, y1]` for edges in
/// the `kappa + lambda ln y + nu y + rho/y` family.
fn piece_integral(mult: f64, lo: Edge, hi: Edge, y0: f64, y1: f64) -> f64 {
    let dk = hi.k - lo.k;
    let dl = hi.l - lo.l;
    let dv = hi.v - lo.v;
    let dr = hi.r - lo.r;
    let (ln0, ln1) = (y0.ln(), y1.ln());
    mult * (dk * (ln1 - ln0) + 0.5 * dl * (ln1 * ln1 - ln0 * ln0) + dv * (y1 - y0)
        - dr * (1.0 / y1 - 1.0 / y0))
}

/// Constants shared by the five subregions for one `(n, c, T)`.
struct Geometry {
    n: f64,
    c: f64,
    t: f64,
    s_plus: f64,
    s_minus: Option<f64>,
    breakpoints: Vec<f64>,
}

impl Geometry {
    fn new(n: u64, c: f64, t: f64) -> Geometry {
        let nf = n as f64;
        let s_plus = (nf * nf + 4.0 * c * c).sqrt();
        let s_minus =
            if nf >= 2.0 * c { Some((nf * nf - 4.0 * c * c).sqrt()) } else { None };
        let mut breakpoints = vec![
            (nf + s_plus) / (2.0 * c),        // n - cy meets -c/y
            t * (s_plus - nf) / (2.0 * c),    // (Tn+cy)/T^2 meets c/y
            nf * t / (2.0 * c),               // ceiling-bound regime switch
            nf / (2.0 * c),                   // |n - 2cy| sign change
            2.0 * c * t / nf,                 // n/(2T) meets c/y
            nf * t / (c * (t + 1.0)),         // (Tn-cy)/T^2 meets n - cy
            nf / c,                           // (Tn-cy)/T^2 reaches zero at Tn/c guardpoint
        ];
        if let Some(sm) = s_minus {
            breakpoints.push((nf + sm) / (2.0 * c)); // n - cy meets c/y (upper)
            breakpoints.push((nf - sm) / (2.0 * c)); // n - cy meets c/y (lower)
            breakpoints.push(t * (nf - sm) / (2.0 * c)); // (Tn-cy)/T^2 meets c/y
        }
        Geometry { n: nf, c, t, s_plus, s_minus, breakpoints }
    }

    /// Integrate one subregion: `bounds(y)` yields the numeric interval and
    /// the symbolic edges valid near `y`, or `None` when empty there.
    fn integrate(
        &self,
        mult: f64,
        bounds: &dyn Fn(f64) -> Option<(f64, f64, Edge, Edge)>,
    ) -> f64 {
        let mut cuts: Vec<f64> = self
            .breakpoints
            .iter()
            .copied()
            .filter(|&b| b.is_finite() && b > 1.0 && b < self.t)
            .collect();
        cuts.push(1.0);
        cuts.push(self.t);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-13 * (1.0 + a.abs()));
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (y0, y1) = (w[0], w[1]);
            let mid = 0.5 * (y0 + y1);
            if let Some((xlo, xhi, lo, hi)) = bounds(mid) {
                if xhi > xlo {
                    total += piece_integral(mult, lo, hi, y0, y1);
                }
            }
        }
        total
    }

    // Numeric boundary curves.
    fn floor_line(&self, y: f64) -> f64 {
        self.n - self.c * y
    }
    fn hyp_pos(&self, y: f64) -> f64 {
        self.c / y
    }
    fn hyp_neg(&self, y: f64) -> f64 {
        -self.c / y
    }
    fn ceil_lo(&self, y: f64) -> f64 {
        (self.t * self.n - self.c * y) / (self.t * self.t)
    }
    fn ceil_hi(&self, y: f64) -> f64 {
        (self.t * self.n + self.c * y) / (self.t * self.t)
    }
    fn exist_bound(&self, y: f64) -> f64 {
        self.n * self.n / (4.0 * self.c * y)
    }
    fn regime_switch(&self) -> f64 {
        self.n * self.t / (2.0 * self.c)
    }

    // Symbolic edges of the direct (area-type) integrands, where the inner
    // antiderivative is x itself.
    fn edge_x_floor_line(&self) -> Edge {
        Edge { k: self.n, v: -self.c, ..Default::default() }
    }
    fn edge_x_hyp(&self, sign: f64) -> Edge {
        Edge { r: sign * self.c, ..Default::default() }
    }
    fn edge_x_ceil(&self, sign: f64) -> Edge {
        Edge { k: self.n / self.t, v: sign * self.c / (self.t * self.t), ..Default::default() }
    }

    /// Floor-crossing subregion: `x >= n - cy` inside the region.
    fn a_1(&self) -> f64 {
        self.integrate(1.0, &|y| {
            let xhi = self.hyp_pos(y);
            let (xlo, lo_edge) = if self.floor_line(y) >= self.hyp_neg(y) {
                (self.floor_line(y), self.edge_x_floor_line())
            } else {
                (self.hyp_neg(y), self.edge_x_hyp(-1.0))
            };
            (xlo < xhi).then_some((xlo, xhi, lo_edge, self.edge_x_hyp(1.0)))
        })
    }

    /// Ceiling-crossing subregion: `(Tn - cy)/T^2 <= x <= (Tn + cy)/T^2`.
    fn a_t(&self) -> f64 {
        self.integrate(self.t, &|y| {
            let xlo = self.ceil_lo(y);
            let (xhi, hi_edge) = if self.hyp_pos(y) <= self.ceil_hi(y) {
                (self.hyp_pos(y), self.edge_x_hyp(1.0))
            } else {
                (self.ceil_hi(y), self.edge_x_ceil(1.0))
            };
            (xlo < xhi).then_some((xlo, xhi, self.edge_x_ceil(-1.0), hi_edge))
        })
    }

    // Antiderivative edges for the `y2` integrand `(n - u)/(2xy)`,
    // with antiderivative `(n ln(n + u) - u)/y` at `u = sqrt(n^2 - 4xyc)`.
    fn y2_edge_exist(&self) -> Edge {
        Edge::constant(self.n * self.n.ln())
    }
    fn y2_edge_hyp_pos(&self) -> Edge {
        let sm = self.s_minus.expect("positive hyperbola edge needs n >= 2c");
        Edge::constant(self.n * (self.n + sm).ln() - sm)
    }
    fn y2_edge_hyp_neg(&self) -> Edge {
        Edge::constant(self.n * (self.n + self.s_plus).ln() - self.s_plus)
    }
    fn y2_edge_floor_line(&self) -> Edge {
        // u = 2cy - n on y >= n/(2c)
        Edge {
            k: self.n * (2.0 * self.c).ln() + self.n,
            l: self.n,
            v: -2.0 * self.c,
            r: 0.0,
        }
    }
    fn y2_edge_ceil_lo(&self) -> Edge {
        // u = 2cy/T - n on y >= nT/(2c)
        Edge {
            k: self.n * (2.0 * self.c / self.t).ln() + self.n,
            l: self.n,
            v: -2.0 * self.c / self.t,
            r: 0.0,
        }
    }

    /// First-exit subregion: `y2` realized in `[1, T]`.
    fn a_y2(&self) -> f64 {
        self.integrate(1.0, &|y| {
            let floor_is_lower = self.floor_line(y) >= self.hyp_neg(y);
            let xlo = if floor_is_lower { self.floor_line(y) } else { self.hyp_neg(y) };
            // Upper bound: existence, the region edge, and (beyond the regime
            // switch) the ceiling condition.
            let mut xhi = self.exist_bound(y);
            let mut hi_edge = self.y2_edge_exist();
            if self.hyp_pos(y) < xhi {
                xhi = self.hyp_pos(y);
                hi_edge = self.y2_edge_hyp_pos();
            }
            if y > self.regime_switch() && self.ceil_lo(y) < xhi {
                xhi = self.ceil_lo(y);
                hi_edge = self.y2_edge_ceil_lo();
            }
            if xlo >= xhi {
                return None;
            }
            let lo_edge = if floor_is_lower {
                // Nonempty forces y past n/(2c), so |n - 2cy| = 2cy - n here.
                debug_assert!(2.0 * self.c * y >= self.n * (1.0 - 1e-9));
                self.y2_edge_floor_line()
            } else {
                self.y2_edge_hyp_neg()
            };
            Some((xlo, xhi, lo_edge, hi_edge))
        })
    }

    // Edges for the `y3` integrand `(n + u)/(2xy)`, antiderivative
    // `(n ln(n - u) + u)/y`.
    fn y3_edge_exist(&self) -> Edge {
        Edge::constant(self.n * self.n.ln())
    }
    fn y3_edge_hyp_pos(&self) -> Edge {
        let sm = self.s_minus.expect("positive hyperbola edge needs n >= 2c");
        Edge::constant(self.n * (self.n - sm).ln() + sm)
    }
    fn y3_edge_ceil_lo(&self) -> Edge {
        // u = n - 2cy/T on y <= nT/(2c)
        Edge {
            k: self.n * (2.0 * self.c / self.t).ln() + self.n,
            l: self.n,
            v: -2.0 * self.c / self.t,
            r: 0.0,
        }
    }

    /// Re-entry subregion: `y3` realized in `[1, T]` (positive `x` only).
    fn a_y3(&self) -> f64 {
        self.integrate(1.0, &|y| {
            if y > self.regime_switch() {
                // The lower bound n/(2T) already exceeds the existence bound.
                return None;
            }
            let xlo = self.ceil_lo(y);
            let mut xhi = self.exist_bound(y);
            let mut hi_edge = self.y3_edge_exist();
            if self.hyp_pos(y) < xhi {
                xhi = self.hyp_pos(y);
                hi_edge = self.y3_edge_hyp_pos();
            }
            (xlo < xhi).then_some((xlo, xhi, self.y3_edge_ceil_lo(), hi_edge))
        })
    }

    // Edges for the `y4` integrand `(n + v)/(2xy)` with `v = sqrt(n^2 + 4xyc)`,
    // antiderivative `(v + n ln(v - n))/y`.
    fn y4_edge_hyp_pos(&self) -> Edge {
        Edge::constant(self.s_plus + self.n * (self.s_plus - self.n).ln())
    }
    fn y4_edge_ceil_hi(&self) -> Edge {
        // v = n + 2cy/T
        Edge {
            k: self.n + self.n * (2.0 * self.c / self.t).ln(),
            l: self.n,
            v: 2.0 * self.c / self.t,
            r: 0.0,
        }
    }

    /// Final-exit subregion: `y4` realized in `[1, T]` (positive `x` only).
    fn a_y4(&self) -> f64 {
        self.integrate(1.0, &|y| {
            let xlo = self.ceil_hi(y);
            let xhi = self.hyp_pos(y);
            (xlo < xhi).then_some((xlo, xhi, self.y4_edge_ceil_hi(), self.y4_edge_hyp_pos()))
        })
    }

    /// The printed `y4` closed form, evaluated without regard to validity;
    /// equals `a_y4` inside the validity range and defines the excluded
    /// epsilon term above it.
    fn y4_printed_form(&self) -> f64 {
        let y_d = self.t * (self.s_plus - self.n) / (2.0 * self.c);
        (self.s_plus - self.n) * (y_d.ln() - 1.0) + 0.5 * self.n * y_d.ln() * y_d.ln()
            + 2.0 * self.c / self.t
    }
}

/// Exact value of one subregion integral plus its printed validity flag.
pub fn closed_form_a(alpha: Subregion, n: u64, c: f64, t: f64) -> Result<SubregionValue> {
    if n < 1 || !(c > 0.0) || !(t > 1.0) {
        return Err(Error::Domain("need n >= 1, c > 0, T > 1".into()));
    }
    let geo = Geometry::new(n, c, t);
    let nf = n as f64;
    let (value, limit) = match alpha {
        Subregion::Floor => (geo.a_1(), n_truncation(c, t)),
        Subregion::ExitY2 => (geo.a_y2(), n_truncation(c, t)),
        Subregion::ReentryY3 => (geo.a_y3(), n_truncation(c, t)),
        Subregion::ExitY4 => (geo.a_y4(), n_y4_validity(c, t)),
        Subregion::Ceiling => (geo.a_t(), n_truncation(c, t)),
    };
    Ok(SubregionValue { value, valid: nf <= limit })
}

/// The full segment-length integral for one `n`: signed combination of the
/// five exact subregion integrals, with the out-of-validity `y4` term
/// excluded exactly and reported.
pub fn full_integral(n: u64, c: f64, t: f64) -> Result<IntegralBreakdown> {
    if n < 1 {
        return Err(Error::Domain("need n >= 1".into()));
    }
    let nf = n as f64;
    if nf > n_truncation(c, t) * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "n = {n} beyond the truncation bound cT + c/T = {}",
            n_truncation(c, t)
        )));
    }
    let geo = Geometry::new(n, c, t);
    let a_1 = SubregionValue { value: geo.a_1(), valid: true };
    let a_y2 = SubregionValue { value: geo.a_y2(), valid: true };
    let a_y3 = SubregionValue { value: geo.a_y3(), valid: true };
    let a_t = SubregionValue { value: geo.a_t(), valid: true };
    let y4_valid = nf <= n_y4_validity(c, t);
    let a_y4 = SubregionValue { value: geo.a_y4(), valid: y4_valid };
    debug_assert!(y4_valid || a_y4.value == 0.0, "empty subregion must integrate to zero");
    let eps_y4_excluded = (!y4_valid).then(|| geo.y4_printed_form());
    let total = a_t.value + a_y4.value - a_y3.value + a_y2.value - a_1.value;
    Ok(IntegralBreakdown { n, a_1, a_y2, a_y3, a_y4, a_t, total, eps_y4_excluded })
}

/// Oracle route: the same integral by adaptive two-dimensional quadrature of
/// the closed-form segment length, with the subregion boundary curves supplied
/// as splitting curves (per-cell tolerance 1e-8).
pub fn full_integral_quadrature(n: u64, c: f64, t: f64) -> Result<f64> {
    if n < 1 || !(c > 0.0) || !(t > 1.0) {
        return Err(Error::Domain("need n >= 1, c > 0, T > 1".into()));
    }
    let geo = Geometry::new(n, c, t);
    let n_i64 = n as i64;
    let outer = |y: f64| -> f64 {
        let lim = c / y;
        let inner = |x: f64| -> f64 {
            let q = SegmentQuery { n: n_i64, x, y, c, t };
            segment_length(&q)
        };
        let cuts = [
            0.0,
            geo.floor_line(y),
            geo.ceil_lo(y),
            geo.ceil_hi(y),
            geo.exist_bound(y),
            -geo.exist_bound(y),
        ];
        adaptive_quad_split(&inner, -lim, lim, &cuts, 1e-8)
    };
    let mut y_cuts = geo.breakpoints.clone();
    y_cuts.push((1.0 + t) / 2.0);
    Ok(adaptive_quad_split(&outer, 1.0, t, &y_cuts, 1e-8))
}

/// Area of the region, `2c log T`.
pub fn region_area(c: f64, t: f64) -> f64 {
    2.0 * c * t.ln()
}
