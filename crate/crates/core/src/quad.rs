//! One-dimensional adaptive quadrature (Gauss–Kronrod 7-15) with optional
//! interior breakpoints, and a two-level nesting helper for double integrals
//! whose inner boundaries are supplied as explicit splitting curves.

/// Kronrod abscissae for the 7-15 pair (positive half, descending).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

/// Gauss weights for the embedded 7-point rule.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Kronrod weights for the 15-point rule.
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// One GK15 panel: returns (kronrod estimate, |kronrod - gauss| error proxy).
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

/// Adaptive bisection driven by the GK15 error proxy. `tol` is absolute.
pub fn adaptive_quad(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        tol: f64,
        depth: u32,
        estimate: f64,
        err: f64,
    ) -> f64 {
        if err <= tol || depth == 0 || (b - a).abs() < 1e-15 * (a.abs() + b.abs() + 1.0) {
            return estimate;
        }
        let m = 0.5 * (a + b);
        let (el, erl) = gk15(f, a, m);
        let (er, errr) = gk15(f, m, b);
        recurse(f, a, m, tol * 0.5, depth - 1, el, erl)
            + recurse(f, m, b, tol * 0.5, depth - 1, er, errr)
    }
    if a == b {
        return 0.0;
    }
    let (est, err) = gk15(f, a, b);
    recurse(f, a, b, tol, max_depth, est, err)
}

/// Adaptive quadrature over `[a, b]` split at the given interior breakpoints
/// (values outside the interval are ignored). Singular or non-smooth points of
/// the integrand should be listed so each panel sees a smooth piece.
pub fn adaptive_quad_split(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: f64,
) -> f64 {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x.is_finite() && x > a && x < b)
        .collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    cuts.dedup_by(|p, q| (*p - *q).abs() <= 1e-14 * (p.abs() + q.abs() + 1.0));
    let per_panel = tol / cuts.len().max(1) as f64;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += adaptive_quad(f, w[0], w[1], per_panel, 45);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_is_exact() {
        let f = |x: f64| 3.0 * x * x - 2.0 * x + 1.0;
        assert_abs_diff_eq!(adaptive_quad(&f, 0.0, 2.0, 1e-12, 20), 6.0, epsilon = 1e-12);
    }

    #[test]
    fn log_integrand() {
        // ∫_1^e ln(x) dx = 1.
        let f = |x: f64| x.ln();
        let v = adaptive_quad(&f, 1.0, std::f64::consts::E, 1e-12, 40);
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-11);
    }

    #[test]
    fn sqrt_endpoint_singularity() {
        // ∫_0^1 1/sqrt(x) dx = 2 (integrable endpoint singularity).
        let f = |x: f64| if x > 0.0 { x.powf(-0.5) } else { 0.0 };
        let v = adaptive_quad(&f, 0.0, 1.0, 1e-10, 50);
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn split_handles_kink() {
        // |x - 1/3| over [0,1]: exact value 1/9 - 1/3 + ... compute: ∫|x-c| = (c^2 + (1-c)^2)/2.
        let c = 1.0 / 3.0;
        let f = move |x: f64| (x - c).abs();
        let exact = (c * c + (1.0 - c) * (1.0 - c)) / 2.0;
        let v = adaptive_quad_split(&f, 0.0, 1.0, &[c], 1e-12);
        assert_abs_diff_eq!(v, exact, epsilon = 1e-12);
    }
}
