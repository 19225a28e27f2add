use latspiral::geometry::{PRegion, Region};
use latspiral::haar;

fn main() {
    let region = Region::p(PRegion::new(2, 1.0, 10.0).unwrap());
    for seed in [1u64, 2, 3, 20260810, 42, 77, 99, 123, 1234, 9999] {
        let est = haar::mc_mean(&region, false, 100_000, seed, 8).unwrap();
        let prim = haar::mc_mean(&region, true, 100_000, seed, 8).unwrap();
        let sq = haar::mc_second_moment(&region, true, 100_000, seed, 8).unwrap();
        println!(
            "seed {seed:>9}: z_full {:+.3}  z_prim {:+.3}  z_prim_sq {:+.3}  (full mean {:.4})",
            est.z_score.unwrap(), prim.z_score.unwrap(), sq.z_score.unwrap(), est.mean
        );
    }
}
