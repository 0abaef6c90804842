use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use pxlab::linalg::{c64, hermitian_exp};
use pxlab::nogo::substream;
use pxlab::optics::{
    absorption_stats, dilate_lossy_bs, fock_evolve_linear, occupations, resch_experiment, InterferometerSpec,
};
use rand::Rng;

/// Applies `prod_i (sum_o u[o][i] a_o^dagger)^{n_i}` to the vacuum term by term.
fn brute_force(u: &DMatrix<Complex64>, input: &[usize]) -> BTreeMap<Vec<usize>, Complex64> {
    let m = u.nrows();
    let mut state: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
    state.insert(vec![0; m], c64(1.0, 0.0));
    let mut norm = 1.0;
    for (i, &n) in input.iter().enumerate() {
        for k in 1..=n {
            norm *= k as f64;
            let mut next = BTreeMap::new();
            for (occ, amp) in &state {
                for o in 0..m {
                    let mut out = occ.clone();
                    out[o] += 1;
                    let boost = (out[o] as f64).sqrt();
                    *next.entry(out).or_insert(c64(0.0, 0.0)) += amp * u[(o, i)] * boost;
                }
            }
            state = next;
        }
    }
    for amp in state.values_mut() {
        *amp /= norm.sqrt();
    }
    state
}

fn random_unitary(modes: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = substream(seed, 0);
    let mut h = DMatrix::zeros(modes, modes);
    for i in 0..modes {
        h[(i, i)] = c64(rng.random_range(-2.0..2.0), 0.0);
        for j in (i + 1)..modes {
            let z = c64(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    hermitian_exp(&h)
}

#[test]
fn permanents_match_creation_operator_expansion() {
    for modes in 1..=4 {
        for seed in 0..10 {
            let u = random_unitary(modes, seed * 10 + modes as u64);
            let spec = InterferometerSpec::new(u.clone(), vec![]).unwrap();
            for photons in 0..=2 {
                for input in occupations(photons, modes) {
                    let fast = fock_evolve_linear(&spec, &input).unwrap();
                    let slow = brute_force(&u, &input);
                    for (occ, amp) in &fast {
                        let expect = slow.get(occ).copied().unwrap_or_default();
                        assert!((amp - expect).norm() < 1e-12, "{input:?} -> {occ:?}");
                    }
                    let total: f64 = fast.values().map(|a| a.norm_sqr()).sum();
                    assert!((total - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn hong_ou_mandel_dip() {
    let spec = dilate_lossy_bs(c64(FRAC_1_SQRT_2, 0.0), c64(0.0, FRAC_1_SQRT_2)).unwrap();
    let out = fock_evolve_linear(&spec, &[1, 1, 0, 0]).unwrap();
    assert!(out[&vec![1, 1, 0, 0]].norm_sqr() < 1e-12);
    assert!((out[&vec![2, 0, 0, 0]].norm_sqr() - 0.5).abs() < 1e-12);
    assert!(absorption_stats(&spec, &out).p_absorbed[0] > 1.0 - 1e-12);
}

#[test]
fn half_transmission_statistics() {
    let spec = dilate_lossy_bs(c64(0.5, 0.0), c64(0.5, 0.0)).unwrap();
    let out = fock_evolve_linear(&spec, &[1, 1, 0, 0]).unwrap();
    let stats = absorption_stats(&spec, &out);
    assert!((stats.p_absorbed[0] - 0.5).abs() < 1e-12);
    assert!(stats.p_absorbed[1].abs() < 1e-12);
    assert!((stats.p_absorbed[2] - 0.5).abs() < 1e-12);

    // Same numbers from the symmetric and antisymmetric port modes: the
    // symmetric mode passes with amplitude t + r = 1, the other is lost.
    let slow = brute_force(spec.transfer(), &[1, 1, 0, 0]);
    let lost_two: f64 = slow
        .iter()
        .filter(|(occ, _)| occ[2] + occ[3] == 2)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    assert!((lost_two - 0.5).abs() < 1e-12);
}

#[test]
fn resch_enhancement_doubles_absorption() {
    let (t, r) = (c64(0.5, 0.0), c64(0.5, 0.0));
    let single = 1.0 - (t.norm_sqr() + r.norm_sqr());
    let independent = resch_experiment(t, r, 0.0).unwrap();
    assert!((independent.p_absorbed[2] - single * single).abs() < 1e-12);
    let bunched = resch_experiment(t, r, 1.0).unwrap();
    assert!((bunched.p_absorbed[2] - 0.5).abs() < 1e-12);
}

fn symmetric_block() -> impl Strategy<Value = (Complex64, Complex64)> {
    (0.0..1.0f64, -3.2..3.2f64, 0.0..1.0f64, -3.2..3.2f64).prop_map(|(a, pa, b, pb)| {
        let (s, d) = (Complex64::from_polar(a, pa), Complex64::from_polar(b, pb));
        ((s + d) / 2.0, (s - d) / 2.0)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn absorption_probabilities_sum_to_one((t, r) in symmetric_block(), d in 0.0..=1.0f64) {
        let stats = resch_experiment(t, r, d).unwrap();
        prop_assert!((stats.total() - 1.0).abs() < 1e-12);
        for p in stats.p_absorbed {
            prop_assert!((-1e-15..=1.0 + 1e-12).contains(&p));
        }
    }

    #[test]
    fn single_photon_statistics_survive_dilation((t, r) in symmetric_block()) {
        let spec = dilate_lossy_bs(t, r).unwrap();
        let out = fock_evolve_linear(&spec, &[1, 0, 0, 0]).unwrap();
        prop_assert!((out[&vec![1, 0, 0, 0]].norm_sqr() - t.norm_sqr()).abs() < 1e-12);
        prop_assert!((out[&vec![0, 1, 0, 0]].norm_sqr() - r.norm_sqr()).abs() < 1e-12);
        let lost = absorption_stats(&spec, &out).p_absorbed[1];
        prop_assert!((lost - (1.0 - t.norm_sqr() - r.norm_sqr())).abs() < 1e-12);
    }

    #[test]
    fn absorption_is_monotone_in_distinguishability(a in 0.0..1.0f64, d0 in 0.0..1.0f64, d1 in 0.0..1.0f64) {
        let (t, r) = (c64(a / 2.0, 0.0), c64(a / 2.0, 0.0));
        let (lo, hi) = if d0 <= d1 { (d0, d1) } else { (d1, d0) };
        let p_lo = resch_experiment(t, r, lo).unwrap().p_absorbed[2];
        let p_hi = resch_experiment(t, r, hi).unwrap().p_absorbed[2];
        prop_assert!(p_hi >= p_lo - 1e-14);
    }
}
