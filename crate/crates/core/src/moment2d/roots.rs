//! Heights at which the transversal line crosses the hyperbolic boundary
//! `|X| Y = c`.
//!
//! Along the line associated with `(n, x, y)`, the cross coordinate at height
//! `Y` is `X(Y) = (x Y - n)/y`, so boundary crossings solve the two quadratics
//! `x Y^2 - n Y -+ c y = 0`. With `s± = sqrt(n^2 ± 4xyc)` the four candidate
//! heights are
//!
//! ```text
//! y1 = (n - s+)/(2x)   y2 = (n - s-)/(2x)   y3 = (n + s-)/(2x)   y4 = (n + s+)/(2x)
//! ```
//!
//! ordered `y1 < 0 < y2 < y3 < y4` for `x > 0, n > 0` and
//! `y3 < y4 < y1 < 0 < y2` for `x < 0`. A vertical line (`x = 0`) crosses at
//! the two heights `±cy/n`, the limits of `y1` and `y2`.

/// The candidate crossing heights; absent entries mean the corresponding
/// quadratic has no real root.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RootsY {
    pub y1: Option<f64>,
    pub y2: Option<f64>,
    pub y3: Option<f64>,
    pub y4: Option<f64>,
}

/// Crossing heights of the line for `(n, x, y)` with the boundary `|X| Y = c`.
pub fn roots_y(n: i64, x: f64, y: f64, c: f64) -> RootsY {
    assert!(n != 0, "n must be nonzero");
    let nf = n as f64;
    if x == 0.0 {
        let v = (c * y / nf).abs();
        return RootsY { y1: Some(-v), y2: Some(v), y3: None, y4: None };
    }
    let disc_plus = nf * nf + 4.0 * x * y * c;
    let disc_minus = nf * nf - 4.0 * x * y * c;
    let pair = |disc: f64| -> (Option<f64>, Option<f64>) {
        if disc < 0.0 {
            (None, None)
        } else {
            let s = disc.sqrt();
            (Some((nf - s) / (2.0 * x)), Some((nf + s) / (2.0 * x)))
        }
    };
    let (y1, y4) = pair(disc_plus);
    let (y2, y3) = pair(disc_minus);
    RootsY { y1, y2, y3, y4 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Substitution check: a crossing height must satisfy |X(Y)| Y = c.
    fn on_boundary(n: i64, x: f64, y: f64, c: f64, root: f64) {
        let big_x = (x * root - n as f64) / y;
        assert_abs_diff_eq!(big_x.abs() * root.abs(), c, epsilon = 1e-9 * c.max(1.0));
    }

    #[test]
    fn worked_example() {
        let r = roots_y(1, 0.1, 2.0, 1.0);
        assert_abs_diff_eq!(r.y1.unwrap(), (1.0 - 1.8f64.sqrt()) / 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(r.y1.unwrap(), -1.708_203_932_499_369, epsilon = 1e-9);
        assert_abs_diff_eq!(r.y2.unwrap(), 2.763_932_022_500_21, epsilon = 1e-9);
        assert_abs_diff_eq!(r.y3.unwrap(), 7.236_067_977_499_79, epsilon = 1e-9);
        assert_abs_diff_eq!(r.y4.unwrap(), 11.708_203_932_499_369, epsilon = 1e-9);
        for root in [r.y1, r.y2, r.y3, r.y4].into_iter().flatten() {
            on_boundary(1, 0.1, 2.0, 1.0, root);
        }
    }

    #[test]
    fn negative_discriminant_drops_middle_pair() {
        // 4xyc > n^2: y2, y3 absent.
        let r = roots_y(1, 0.4, 2.0, 1.0);
        assert!(r.y2.is_none() && r.y3.is_none());
        assert!(r.y1.is_some() && r.y4.is_some());
    }

    #[test]
    fn vertical_line_branch_matches_limit() {
        let (n, y, c) = (2i64, 3.0, 1.5);
        let r0 = roots_y(n, 0.0, y, c);
        assert_abs_diff_eq!(r0.y2.unwrap(), c * y / n as f64, epsilon = 0.0);
        assert_abs_diff_eq!(r0.y1.unwrap(), -c * y / n as f64, epsilon = 0.0);
        // x -> 0 limit of the generic branch.
        let r_eps = roots_y(n, 1e-9, y, c);
        assert_abs_diff_eq!(r_eps.y2.unwrap(), r0.y2.unwrap(), epsilon = 1e-6);
        assert_abs_diff_eq!(r_eps.y1.unwrap(), r0.y1.unwrap(), epsilon = 1e-6);
    }

    #[test]
    fn ordering_and_boundary_membership_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..2000 {
            let n = rng.random_range(1..=12i64);
            let c: f64 = rng.random_range(0.3..2.5);
            let y: f64 = rng.random_range(1.0..20.0);
            let x: f64 = rng.random_range(-1.0f64..1.0).clamp(-c / y, c / y);
            if x == 0.0 {
                continue;
            }
            let r = roots_y(n, x, y, c);
            for root in [r.y1, r.y2, r.y3, r.y4].into_iter().flatten() {
                on_boundary(n, x, y, c, root);
            }
            if x > 0.0 {
                let (y1, y4) = (r.y1.unwrap(), r.y4.unwrap());
                assert!(y1 < 0.0 && 0.0 < y4);
                if let (Some(y2), Some(y3)) = (r.y2, r.y3) {
                    assert!(y1 < y2 && y2 <= y3 && y3 < y4);
                }
            } else {
                let (y2, y3) = (r.y2.unwrap(), r.y3.unwrap());
                assert!(y3 < 0.0 && 0.0 < y2);
                if let (Some(y1), Some(y4)) = (r.y1, r.y4) {
                    assert!(y3 < y4 && y4 <= y1 && y1 < 0.0);
                }
            }
        }
    }

    #[test]
    fn derivative_signs_by_finite_differences() {
        // At points where the middle roots exist: dy2/dx >= 0, dy3/dx <= 0,
        // dy4/dx <= 0 (and dy1/dx >= 0), by central differences.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(101);
        let h = 1e-7;
        let mut checked = 0;
        while checked < 1000 {
            let n = rng.random_range(1..=8i64);
            let c: f64 = rng.random_range(0.5..2.0);
            let y: f64 = rng.random_range(1.0..15.0);
            let x: f64 = rng.random_range(1e-3..(c / y).min(1.0));
            let lo = roots_y(n, x - h, y, c);
            let hi = roots_y(n, x + h, y, c);
            let (Some(a2), Some(b2)) = (lo.y2, hi.y2) else { continue };
            let (Some(a3), Some(b3)) = (lo.y3, hi.y3) else { continue };
            assert!(b2 - a2 >= -1e-6, "dy2/dx at x={x}");
            assert!(b3 - a3 <= 1e-6, "dy3/dx at x={x}");
            assert!(hi.y4.unwrap() - lo.y4.unwrap() <= 1e-6, "dy4/dx at x={x}");
            assert!(hi.y1.unwrap() - lo.y1.unwrap() >= -1e-6, "dy1/dx at x={x}");
            checked += 1;
        }
    }
}
