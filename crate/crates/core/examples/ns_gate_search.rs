//! Numerical search for the postselected nonlinear-sign gate.
//!
//! `cargo run --release --example ns_gate_search [restarts]`
use pxlab::optics::{ns_gate_search, NsSearchConfig};

fn main() {
    let restarts = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(32);
    let best = ns_gate_search(&NsSearchConfig::new(0, restarts)).unwrap();
    println!("success probability {:.9} (restart {})", best.success_prob, best.restart);
    println!("infidelity {:.2e}", 1.0 - best.fidelity);
    for (n, a) in best.amplitudes.iter().enumerate() {
        println!("  c{n} = {:+.6} {:+.6}i", a.re, a.im);
    }
    println!("transfer = {:.5}", best.transfer);
}
