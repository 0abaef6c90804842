//! Evolves |2,0,0> under a single drive and prints the trajectory.
use pxlab::dynamics::{evolve_sequence, PulseSegment, PulseSequence};
use pxlab::sector::{DickeModel, Occupation, StateVector};

fn main() {
    let model = DickeModel::finite(2);
    let seq = PulseSequence::new(vec![PulseSegment::new(2.0, 0.0, 0.25); 8]);
    let start = Occupation::new(2, 0, 0);
    let initial = StateVector::basis(start, &model).unwrap();
    let (_, trajectory) = evolve_sequence(&seq, &initial, &model);
    println!("{:>6} {:>10} {:>10} {:>10}", "t", "P(2,0,0)", "P(1,0,1)", "P(0,0,2)");
    for (k, psi) in trajectory.iter().enumerate() {
        let p = |o| psi.amplitude(o).norm_sqr();
        println!(
            "{:>6.2} {:>10.6} {:>10.6} {:>10.6}",
            k as f64 * 0.25,
            p(start),
            p(Occupation::new(1, 0, 1)),
            p(Occupation::new(0, 0, 2))
        );
    }
}
