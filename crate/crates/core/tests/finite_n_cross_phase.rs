//! A saturable collective mode (finite N) admits a cross phase of pi while
//! every probe returns. The bosonic limit does not.

use pxlab::dynamics::PulseSequence;
use pxlab::observables::{nonlinear_phase, Variant};
use pxlab::sector::DickeModel;

const WITNESS: &str = r#"{"segments":[{"g1":-9.867917678825577,"g2":-9.857933588765665,"duration":0.6855180435668653},{"g1":-0.9998054576930444,"g2":6.425806464138361,"duration":0.6671249961786413},{"g1":-4.926099727823182,"g2":-0.6995296482442671,"duration":3.5714145805250417},{"g1":0.5832187203352444,"g2":9.907616443129301,"duration":3.88685203007268},{"g1":6.795059516620771,"g2":5.284207720135157,"duration":3.8422492226509983},{"g1":-3.1179631695995047,"g2":1.089553613505799,"duration":6.282603770270963},{"g1":7.120034436783841,"g2":3.1194602278139847,"duration":5.805029023513147},{"g1":0.6014925251323294,"g2":-9.56857232996674,"duration":4.044977120928124}]}"#;

#[test]
fn witness_returns_every_probe_with_phase_pi() {
    let seq: PulseSequence = serde_json::from_str(WITNESS).unwrap();
    let (phi, report) = nonlinear_phase(&seq, &DickeModel::finite(2), Variant::TwoMode).unwrap();
    assert!(report.composite_loss < 1e-9, "loss {:e}", report.composite_loss);
    assert!((phi.abs() - std::f64::consts::PI).abs() < 1e-6, "phi {phi}");
    // A linear map would give A11 = A10 * A01.
    let a = |i: usize| report.probes[i].amplitude();
    assert!((a(3) - a(1) * a(2)).norm() > 1.9);
}

#[test]
fn same_pulses_are_linear_in_the_bosonic_limit() {
    let seq: PulseSequence = serde_json::from_str(WITNESS).unwrap();
    let report = pxlab::observables::probe_report(&seq, &DickeModel::bosonic(), Variant::TwoMode);
    let a = |i: usize| report.probes[i].amplitude();
    assert!((a(3) - a(1) * a(2)).norm() < 1e-10);
}
