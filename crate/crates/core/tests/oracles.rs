use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, Matrix3, SymmetricEigen};
use num_complex::Complex64;
use pxlab::dynamics::{effective_coupling, evolve_sequence, PulseSegment, PulseSequence, SectorGenerators};
use pxlab::linalg::fock_amplitude;
use pxlab::nogo::substream;
use pxlab::observables::{bosonic_two_photon_amplitude, two_photon_coupling_product};
use pxlab::sector::{dicke_step_coeff, enumerate_sector, DickeModel, Occupation, StateVector};
use rand::Rng;

fn random_sequence(rng: &mut impl Rng, phases: bool) -> PulseSequence {
    let k = rng.random_range(1..=6);
    let segments = (0..k)
        .map(|_| {
            let seg = PulseSegment::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(0.0..2.0),
            );
            if phases {
                seg.with_phases(rng.random_range(-PI..PI), rng.random_range(-PI..PI))
            } else {
                seg
            }
        })
        .collect();
    PulseSequence::new(segments)
}

/// Single-excitation propagator as a mode transfer over (photon 1, photon 2, collective).
fn mode_transfer(seq: &PulseSequence, model: &DickeModel) -> DMatrix<Complex64> {
    let sector = Arc::new(enumerate_sector(1, model));
    let u = SectorGenerators::new(Arc::clone(&sector), model).unitary(seq);
    let modes = [Occupation::new(1, 0, 0), Occupation::new(0, 1, 0), Occupation::new(0, 0, 1)];
    let idx: Vec<usize> = modes.iter().map(|&m| sector.index_of(m).unwrap()).collect();
    DMatrix::from_fn(3, 3, |o, i| u[(idx[o], idx[i])])
}

#[test]
fn sector_two_matches_permanents() {
    let model = DickeModel::bosonic();
    let sector = Arc::new(enumerate_sector(2, &model));
    let gens = SectorGenerators::new(Arc::clone(&sector), &model);
    let mut worst: f64 = 0.0;
    for instance in 0..200u64 {
        let mut rng = substream(2024, instance);
        let seq = random_sequence(&mut rng, instance % 2 == 1);
        let u1 = mode_transfer(&seq, &model);
        let u2 = gens.unitary(&seq);
        for (j, src) in sector.states().iter().enumerate() {
            for (i, dst) in sector.states().iter().enumerate() {
                let expect = fock_amplitude(&u1, &[src.n1, src.n2, src.r], &[dst.n1, dst.n2, dst.r]);
                worst = worst.max((u2[(i, j)] - expect).norm());
                if src.r == 0 && dst.r == 0 {
                    let oracle = bosonic_two_photon_amplitude(&u1, (src.n1, src.n2), (dst.n1, dst.n2)).unwrap();
                    assert!((oracle - expect).norm() < 1e-14);
                }
            }
        }
    }
    assert!(worst < 1e-10, "worst deviation {worst:e}");
}

#[test]
fn cross_kerr_amplitude_is_two_by_two_permanent() {
    let mut rng = substream(7, 0);
    let u = mode_transfer(&random_sequence(&mut rng, true), &DickeModel::bosonic());
    let a11 = bosonic_two_photon_amplitude(&u, (1, 1), (1, 1)).unwrap();
    let expect = u[(0, 0)] * u[(1, 1)] + u[(0, 1)] * u[(1, 0)];
    assert!((a11 - expect).norm() < 1e-15);
}

#[test]
fn one_mode_closed_form() {
    let model = DickeModel::finite(2);
    for k in 0..200 {
        let t = k as f64 * 0.037;
        let seq = PulseSequence::single(2.0, 0.0, t);
        let one = StateVector::basis(Occupation::new(1, 0, 0), &model).unwrap();
        let two = StateVector::basis(Occupation::new(2, 0, 0), &model).unwrap();
        let a1 = evolve_sequence(&seq, &one, &model).0.amplitude(Occupation::new(1, 0, 0));
        let a2 = evolve_sequence(&seq, &two, &model).0.amplitude(Occupation::new(2, 0, 0));
        assert!((a1 - Complex64::new((2.0 * t).cos(), 0.0)).norm() < 1e-10);
        let a2_expect = (1.0 + 2.0 * (2.0 * 3f64.sqrt() * t).cos()) / 3.0;
        assert!((a2 - Complex64::new(a2_expect, 0.0)).norm() < 1e-10, "t = {t}");
    }
}

#[test]
fn sector_counts_match_brute_force() {
    for n_atoms in [1usize, 2, 3, 5] {
        let model = DickeModel::finite(n_atoms);
        for n in 0..7 {
            let mut brute = Vec::new();
            for n1 in 0..=n {
                for n2 in 0..=n - n1 {
                    let r = n - n1 - n2;
                    if r <= n_atoms {
                        brute.push(Occupation::new(n1, n2, r));
                    }
                }
            }
            brute.sort();
            assert_eq!(enumerate_sector(n, &model).states(), &brute[..]);
        }
    }
    assert_eq!(enumerate_sector(2, &DickeModel::finite(1)).len(), 5);
    assert_eq!(enumerate_sector(2, &DickeModel::bosonic()).len(), 6);
}

#[test]
fn ladder_deviation_from_bosonic() {
    for n in 2..=1024usize {
        let model = DickeModel::finite(n);
        for r in [0usize, 1, 2.min(n - 1)] {
            let finite = dicke_step_coeff(r, &model).unwrap();
            let bosonic = dicke_step_coeff(r, &DickeModel::bosonic()).unwrap();
            let expected = (1.0 - r as f64 / n as f64).sqrt();
            assert!((finite / bosonic - expected).abs() < 1e-12);
        }
    }
}

#[test]
fn coupling_product_matches_hamiltonian_elements() {
    for n in [2usize, 3, 8, 64] {
        let model = DickeModel::finite(n);
        let eps = 0.3;
        let g = n as f64 * eps;
        let sector = Arc::new(enumerate_sector(2, &model));
        let h = pxlab::dynamics::build_hamiltonian(&PulseSegment::new(g, 0.0, 1.0), &sector, &model).matrix;
        let at = |a: Occupation, b: Occupation| h[(sector.index_of(a).unwrap(), sector.index_of(b).unwrap())].re;
        let first = at(Occupation::new(1, 0, 1), Occupation::new(2, 0, 0));
        let second = at(Occupation::new(0, 0, 2), Occupation::new(1, 0, 1));
        let product = two_photon_coupling_product(n, eps);
        assert!((first * second - product).abs() < 1e-10 * product, "N = {n}");
    }
}

/// Exact three-level Raman system `|g, photon> - |e> - |g', collective>` with
/// detuning `delta` on the excited state. The effective two-level coupling is
/// read off the low-energy eigenpairs.
fn exact_raman_coupling(g3: f64, omega: f64, delta: f64) -> f64 {
    let h = Matrix3::new(0.0, g3, 0.0, g3, delta, omega, 0.0, omega, 0.0);
    let eig = SymmetricEigen::new(h);
    let mut heff = [[0.0f64; 2]; 2];
    for k in 0..3 {
        let v = eig.eigenvectors.column(k);
        let weight = v[0] * v[0] + v[2] * v[2];
        if weight < 0.5 {
            continue;
        }
        let p = [v[0] / weight.sqrt(), v[2] / weight.sqrt()];
        for i in 0..2 {
            for j in 0..2 {
                heff[i][j] += eig.eigenvalues[k] * p[i] * p[j];
            }
        }
    }
    -heff[0][1]
}

#[test]
fn raman_coupling_matches_three_level_system() {
    for (g3, omega, delta) in [(1.0, 2.0, 1e3), (0.5, 0.7, -400.0), (2.0, 1.0, 5e3)] {
        let approx = effective_coupling(g3, omega, delta).unwrap();
        let exact = exact_raman_coupling(g3, omega, delta);
        let rel = (exact - approx).abs() / approx.abs();
        let order = (g3 * g3 + omega * omega) / (delta * delta);
        assert!(rel < 10.0 * order, "rel {rel:e} vs {order:e}");
    }
    assert!((effective_coupling(1.0, 2.0, 10.0).unwrap() - 0.2).abs() < 1e-15);
}
