//! Two-photon absorption on a half-transmitting beam splitter as the photons
//! become indistinguishable.
use pxlab::linalg::c64;
use pxlab::optics::resch_experiment;

fn main() {
    let (t, r) = (c64(0.5, 0.0), c64(0.5, 0.0));
    println!("{:>5} {:>8} {:>8} {:>8}", "d", "P(0)", "P(1)", "P(2)");
    for k in 0..=10 {
        let d = k as f64 / 10.0;
        let s = resch_experiment(t, r, d).unwrap();
        println!("{d:>5.1} {:>8.4} {:>8.4} {:>8.4}", s.p_absorbed[0], s.p_absorbed[1], s.p_absorbed[2]);
    }
}
