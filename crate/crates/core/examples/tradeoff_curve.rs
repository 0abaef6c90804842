//! Best nonlinear phase against loss budget in the bosonic limit with
//! complex drive phases.
use pxlab::nogo::{log_log_slope, tradeoff_curve, OptimizationTask};
use pxlab::observables::Variant;
use pxlab::sector::DickeModel;

fn main() {
    let budgets = [1e-3, 1e-2, 1e-1];
    let template = OptimizationTask {
        restarts: 8,
        drive_phases: true,
        ..OptimizationTask::new(DickeModel::bosonic(), Variant::TwoMode, budgets[0])
    };
    let points = tradeoff_curve(&template, &budgets).unwrap();
    for p in &points {
        println!("budget {:.0e}: |phi| = {:.4e} at loss {:.4e}", p.budget, p.best_phi_nl_abs, p.achieved_loss);
    }
    if let Some(s) = log_log_slope(&points) {
        println!("log-log slope {s:.3}");
    }
}
