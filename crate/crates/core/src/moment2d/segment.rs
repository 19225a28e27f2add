//! Length of the parameter set along which the transversal line stays inside
//! the region, and the eightfold classification of its boundary crossings.

use serde::Serialize;

use crate::moment2d::roots::{roots_y, RootsY};
use crate::{Error, Result};

/// A transversal-line query anchored at a region point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SegmentQuery {
    pub n: i64,
    pub x: f64,
    pub y: f64,
    pub c: f64,
    pub t: f64,
}

impl SegmentQuery {
    /// `(x, y)` must lie in the region `|x| y <= c`, `1 < y <= T`.
    pub fn new(n: i64, x: f64, y: f64, c: f64, t: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be nonzero".into()));
        }
        if !(t > 1.0) || !(c > 0.0) {
            return Err(Error::Domain("need T > 1 and c > 0".into()));
        }
        let tol = 1e-9 * c.max(1.0);
        if !(y > 1.0 && y <= t * (1.0 + 1e-12) && x.abs() * y <= c + tol) {
            return Err(Error::Domain(format!("({x}, {y}) lies outside the region")));
        }
        Ok(SegmentQuery { n, x, y, c, t })
    }
}

/// End of a membership interval in the height coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Crossing {
    Floor,
    Ceiling,
    Y2,
    Y3,
    Y4,
}

/// Which of the paper-family's eight crossing patterns a query realizes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntersectionProfile {
    pub case_id: u8,
    /// Middle/outer roots realized as interval ends inside `[1, T]`.
    pub roots: Vec<Crossing>,
    pub hits_floor: bool,
    pub hits_ceiling: bool,
    /// Membership intervals in the height coordinate, low to high.
    pub intervals: Vec<(f64, f64)>,
}

/// Membership intervals of the line in the height coordinate: the set of `Y`
/// in `(1, T]` where `|X(Y)| Y <= c` with `X(Y) = (x Y - n)/y`, as a union of
/// at most two closed intervals with tagged endpoints.
///
/// Negative `n` is folded through the exact mirror `(n, x) -> (-n, -x)`:
/// `|(-x) Y - (-n)| = |x Y - n|`, so the mirrored query has an identical
/// membership set (bit for bit).
fn height_intervals(q: &SegmentQuery) -> Vec<((f64, Crossing), (f64, Crossing))> {
    let q = if q.n < 0 { SegmentQuery { n: -q.n, x: -q.x, ..*q } } else { *q };
    let SegmentQuery { n, x, y, c, t } = q;
    let nf = n as f64;
    let RootsY { y1, y2, y3, y4 } = roots_y(n, x, y, c);

    // Solution set of the two quadratic constraints on (0, inf), before the
    // band restriction. Endpoints are tagged with their provenance.
    let mut pieces: Vec<((f64, Crossing), (f64, Crossing))> = Vec::new();
    let mut push = |lo: (f64, Crossing), hi: (f64, Crossing)| {
        if hi.0 > lo.0 {
            pieces.push((lo, hi));
        }
    };
    const NEG: f64 = f64::NEG_INFINITY;
    if x == 0.0 {
        // Vertical line: |n| Y <= c y.
        push((NEG, Crossing::Floor), (c * y / nf.abs(), Crossing::Y2));
    } else if x > 0.0 {
        // Upward parabolas: allowed on [y1, y4] minus the open gap (y2, y3).
        let (a, b) = (y1.unwrap(), y4.unwrap());
        match (y2, y3) {
            (Some(r2), Some(r3)) => {
                push((a, Crossing::Floor), (r2, Crossing::Y2));
                push((r3, Crossing::Y3), (b, Crossing::Y4));
            }
            _ => push((a, Crossing::Floor), (b, Crossing::Y4)),
        }
    } else {
        // Downward parabolas. Outside (min(y1,y4), max(y1,y4)) for the first
        // constraint (all Y when no real roots), inside [y3, y2] for the
        // second; on the positive axis this leaves (0-ish, y2] minus any
        // positive part of the first constraint's gap.
        let r2 = y2.unwrap(); // positive
        if let (Some(r1), Some(r4)) = (y1, y4) {
            // Ordering y3 < y4 <= y1 < 0 < y2: the gap (y4, y1) is entirely
            // negative and never trims the positive piece.
            debug_assert!(r1 < 0.0 && r4 < 0.0);
        }
        push((NEG, Crossing::Floor), (r2, Crossing::Y2));
    }

    // Restrict to the band (1, T] and retag clipped endpoints.
    let mut out = Vec::new();
    for ((lo, lo_tag), (hi, hi_tag)) in pieces {
        let (mut lo, mut lo_tag) = (lo, lo_tag);
        let (mut hi, mut hi_tag) = (hi, hi_tag);
        if lo < 1.0 {
            lo = 1.0;
            lo_tag = Crossing::Floor;
        }
        if hi > t {
            hi = t;
            hi_tag = Crossing::Ceiling;
        }
        if hi > lo {
            out.push(((lo, lo_tag), (hi, hi_tag)));
        }
    }
    out
}

/// Measure of the parameter set along which the line stays inside the region.
/// Heights advance at rate `y` in the line parameter, so the length is the
/// total height measure divided by `y`.
///
/// The mirror identity `length(n, x) = length(-n, -x)` holds exactly (same
/// floats); at a fixed anchor the two signs of `n` generally measure
/// different lines, but they exchange under `x -> -x`, which is what makes
/// the region integral independent of the sign of `n`.
pub fn segment_length(q: &SegmentQuery) -> f64 {
    height_intervals(q)
        .iter()
        .map(|((lo, _), (hi, _))| hi - lo)
        .sum::<f64>()
        / q.y
}

/// Classify the boundary crossings into the eight possible patterns.
pub fn classify_intersection(q: &SegmentQuery) -> IntersectionProfile {
    let pieces = height_intervals(q);
    let tags: Vec<(Crossing, Crossing)> =
        pieces.iter().map(|&((_, lo), (_, hi))| (lo, hi)).collect();
    let case_id = match tags.as_slice() {
        [] => 8,
        [(Crossing::Floor, Crossing::Ceiling)] => 1,
        [(Crossing::Floor, Crossing::Y2)] => 2,
        [(Crossing::Floor, Crossing::Y4)] => 3,
        [(Crossing::Y3, Crossing::Ceiling)] => 4,
        [(Crossing::Y3, Crossing::Y4)] => 5,
        [(Crossing::Floor, Crossing::Y2), (Crossing::Y3, Crossing::Y4)] => 6,
        [(Crossing::Floor, Crossing::Y2), (Crossing::Y3, Crossing::Ceiling)] => 7,
        other => unreachable!("impossible crossing pattern {other:?} for {q:?}"),
    };
    let mut roots = Vec::new();
    let mut hits_floor = false;
    let mut hits_ceiling = false;
    for (lo, hi) in &tags {
        for tag in [lo, hi] {
            match tag {
                Crossing::Floor => hits_floor = true,
                Crossing::Ceiling => hits_ceiling = true,
                other => roots.push(*other),
            }
        }
    }
    IntersectionProfile {
        case_id,
        roots,
        hits_floor,
        hits_ceiling,
        intervals: pieces.iter().map(|&((lo, _), (hi, _))| (lo, hi)).collect(),
    }
}
