use latspiral::moment2d::{closed_form_a, full_integral, segment_length, SegmentQuery, Subregion};
use latspiral::quad::adaptive_quad_split;

fn main() {
    let (c, t) = (1.0f64, 1e5f64);
    for n in [10_000u64, 50_000] {
        let nf = n as f64;
        let b = full_integral(n, c, t).unwrap();
        println!("n={n}: a1={:.9e} ay2={:.9e} ay3={:.9e} ay4={:.9e} at={:.9e} total={:.9e}",
            b.a_1.value, b.a_y2.value, b.a_y3.value, b.a_y4.value, b.a_t.value, b.total);
        // Dense two-hump quadrature of the segment length.
        let sp = (nf*nf + 4.0*c*c).sqrt();
        let sm = (nf*nf - 4.0*c*c).sqrt();
        let y_c = (nf+sm)/(2.0*c);
        let y_a = (nf+sp)/(2.0*c);
        let t_yb = t*(nf-sm)/(2.0*c);
        let y_d = t*(sp-nf)/(2.0*c);
        let inner = |y: f64| {
            let lim = c/y;
            let f = |x: f64| segment_length(&SegmentQuery { n: n as i64, x, y, c, t });
            adaptive_quad_split(&f, -lim, lim, &[0.0, nf - c*y, (t*nf - c*y)/(t*t), (t*nf + c*y)/(t*t), nf*nf/(4.0*c*y)], 1e-13)
        };
        // hump 1: y in (1, max(t_yb, y_d)+1); hump 2: y in (y_c*0.999.., T)
        let hi1 = t_yb.max(y_d) * 1.2;
        let q1 = adaptive_quad_split(&inner, 1.0, hi1.min(t), &[t_yb, y_d, 2.0*c*t/nf], 1e-12);
        let q2 = if y_c < t {
            adaptive_quad_split(&inner, y_c * 0.9999, t, &[y_c, y_a, nf/c], 1e-12)
        } else { 0.0 };
        println!("   dense-quad: hump1={q1:.9e} hump2={q2:.9e} total={:.9e}", q1 + q2);
        // per-subregion closed values
        for (lbl, s) in [("A1", Subregion::Floor), ("AT", Subregion::Ceiling), ("Ay2", Subregion::ExitY2), ("Ay3", Subregion::ReentryY3), ("Ay4", Subregion::ExitY4)] {
            let v = closed_form_a(s, n, c, t).unwrap();
            println!("   {lbl}: {:.12e} valid={}", v.value, v.valid);
        }
    }
}
