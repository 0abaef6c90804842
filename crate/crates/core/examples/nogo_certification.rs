//! Zero-loss certification over atom numbers and both phase definitions.
//!
//! `cargo run --release --example nogo_certification [restarts]`
use pxlab::error::Error;
use pxlab::nogo::{optimize_phase, OptimizationTask, DEFAULT_NOGO_PHASE_TOL};
use pxlab::observables::Variant;
use pxlab::sector::DickeModel;

fn main() {
    let restarts = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(16);
    for model in [DickeModel::finite(2), DickeModel::finite(8), DickeModel::bosonic()] {
        for variant in [Variant::TwoMode, Variant::OneMode] {
            let task = OptimizationTask {
                restarts,
                ..OptimizationTask::new(model.clone(), variant, 0.0)
            };
            let label = format!("N = {:>3} {:<8}", model.n_atoms.to_string(), format!("{variant:?}"));
            match optimize_phase(&task) {
                Ok(p) => println!(
                    "{label} |phi| = {:.3e} at loss {:.1e}  {}",
                    p.best_phi_nl_abs,
                    p.achieved_loss,
                    if p.best_phi_nl_abs <= DEFAULT_NOGO_PHASE_TOL { "pass" } else { "fail" }
                ),
                Err(Error::Infeasible { excess, .. }) => println!("{label} no zero-loss point found (excess {excess:.1e})"),
                Err(e) => println!("{label} {e}"),
            }
        }
    }
}
