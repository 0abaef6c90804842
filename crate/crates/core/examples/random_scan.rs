//! Uniform random pulse sequences: loss against phase histogram.
use pxlab::nogo::{sample_random_sequences, SamplingBounds};
use pxlab::observables::Variant;
use pxlab::sector::DickeModel;

fn main() {
    for model in [DickeModel::finite(2), DickeModel::bosonic()] {
        let stats = sample_random_sequences(10_000, &model, Variant::TwoMode, SamplingBounds::default(), 1);
        println!(
            "N = {}: {} samples, {} low-loss violations, {} with a fully lost probe",
            model.n_atoms,
            stats.samples.len(),
            stats.violations,
            stats.undefined_phase
        );
        println!("  rows: loss bins of 0.1, columns: |phi| bins of pi/10");
        for row in &stats.histogram {
            println!("  {}", row.iter().map(|c| format!("{c:>5}")).collect::<String>());
        }
    }
}
