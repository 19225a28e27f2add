use latspiral::moment2d::{full_integral, full_integral_quadrature, ky_second_norm};
use latspiral::numtheory::zeta2;

fn main() {
    for &t in &[1e4f64, 3e4, 1e5] {
        let r = ky_second_norm(1.0, t, false).unwrap();
        let mean = r.area / zeta2();
        let centered = r.ky_second_norm - mean * mean;
        println!(
            "T={t:>8}: area={:.4} sum={:.6} ky={:.6} centered={:.6} ratio={:.6} eps_y4={:.3e}",
            r.area, r.weighted_sum, r.ky_second_norm, centered, centered / t.ln(), r.eps_y4_total
        );
        // Where does the weighted sum live? bucket by n.
        let mut buckets = vec![0.0f64; 6];
        for b in &r.per_n {
            let idx = (b.n as f64).log10().floor() as usize;
            buckets[idx.min(5)] += b.total;
        }
        println!("   per-decade unweighted totals: {buckets:?}");
    }
    // Spot-check large-n totals against quadrature at T=1e5.
    for n in [2u64, 10, 100, 1000, 10000, 50000] {
        let e = full_integral(n, 1.0, 1e5).unwrap().total;
        let q = full_integral_quadrature(n, 1.0, 1e5).unwrap();
        println!("n={n:>6}: exact={e:.9e} quad={q:.9e} rel={:.2e}", (e - q).abs() / e.abs().max(1e-30));
    }
}
