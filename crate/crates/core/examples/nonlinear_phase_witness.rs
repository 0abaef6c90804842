//! One-mode N = 2 witnesses: a large phase needs large loss, and loss alone
//! does not produce a phase.
use std::f64::consts::PI;

use pxlab::dynamics::PulseSequence;
use pxlab::observables::{nonlinear_phase, Variant};
use pxlab::sector::DickeModel;

fn main() {
    let model = DickeModel::finite(2);
    for t in [0.5 * PI, 1.5 * PI] {
        let seq = PulseSequence::single(2.0, 0.0, t);
        let (phi, report) = nonlinear_phase(&seq, &model, Variant::OneMode).unwrap();
        println!("t = {:.2} pi: phi_NL = {phi:+.6}, two-photon P_loss = {:.5}", t / PI, report.p_loss);
        for p in &report.probes {
            println!("  A_{} = {:+.6} {:+.6}i", p.label, p.re, p.im);
        }
    }
    match nonlinear_phase(&PulseSequence::single(2.0, 0.0, PI / 4.0), &model, Variant::OneMode) {
        Ok((phi, _)) => println!("t = pi/4: phi_NL = {phi}"),
        Err(e) => println!("t = pi/4: {e}"),
    }
}
