//! Coincidence probability through a beam splitter, lossless and lossy.
use std::f64::consts::FRAC_1_SQRT_2;

use pxlab::linalg::c64;
use pxlab::optics::{absorption_stats, dilate_lossy_bs, fock_evolve_linear};

fn main() {
    let cases = [
        ("lossless 50/50", c64(FRAC_1_SQRT_2, 0.0), c64(0.0, FRAC_1_SQRT_2)),
        ("t = r = 1/2", c64(0.5, 0.0), c64(0.5, 0.0)),
        ("t = 0.6, r = 0.3i", c64(0.6, 0.0), c64(0.0, 0.3)),
    ];
    for (name, t, r) in cases {
        let spec = dilate_lossy_bs(t, r).unwrap();
        let out = fock_evolve_linear(&spec, &[1, 1, 0, 0]).unwrap();
        let stats = absorption_stats(&spec, &out);
        println!(
            "{name:<18} coincidence {:.6}  absorbed 0/1/2: {:.4} {:.4} {:.4}",
            out[&vec![1, 1, 0, 0]].norm_sqr(),
            stats.p_absorbed[0],
            stats.p_absorbed[1],
            stats.p_absorbed[2]
        );
    }
}
