//! Linear optics with postselection: lossy beam splitters as unitary
//! dilations, two-photon absorption statistics, and a numerical search for
//! the postselected nonlinear-sign (NS) gate.
//!
//! Transfer convention: `a_in^† -> sum_out U[out][in] a_out^†`. Multi-photon
//! amplitudes are permanents of transfer submatrices with the usual
//! `1 / sqrt(prod n_in! prod n_out!)` normalization.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, fock_amplitude, hermitian_exp, orthonormalize_columns, unitarity_deviation};
use crate::nogo::{penalty_descent, substream};
use crate::simplex::NelderMead;

pub const UNITARITY_TOL: f64 = 1e-10;
pub const MAX_LINEAR_PHOTONS: usize = 2;

/// Single-particle mode map together with the modes counted as loss.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerSpec {
    transfer: DMatrix<Complex64>,
    loss_modes: Vec<usize>,
}

impl InterferometerSpec {
    pub fn new(transfer: DMatrix<Complex64>, loss_modes: Vec<usize>) -> Result<Self> {
        let deviation = unitarity_deviation(&transfer);
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        if let Some(&bad) = loss_modes.iter().find(|&&m| m >= transfer.nrows()) {
            return Err(Error::InvalidOccupation(format!(
                "loss mode {bad} outside {} modes",
                transfer.nrows()
            )));
        }
        Ok(InterferometerSpec {
            transfer,
            loss_modes,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.transfer.nrows()
    }

    pub fn transfer(&self) -> &DMatrix<Complex64> {
        &self.transfer
    }

    pub fn loss_modes(&self) -> &[usize] {
        &self.loss_modes
    }

    /// Same interferometer acting on `internal` copies of every mode;
    /// mode `m` with internal label `k` becomes `m * internal + k`.
    pub fn with_internal_modes(&self, internal: usize) -> Self {
        let n = self.n_modes();
        let transfer = DMatrix::from_fn(n * internal, n * internal, |i, j| {
            if i % internal == j % internal {
                self.transfer[(i / internal, j / internal)]
            } else {
                c64(0.0, 0.0)
            }
        });
        let loss_modes = self
            .loss_modes
            .iter()
            .flat_map(|&m| (0..internal).map(move |k| m * internal + k))
            .collect();
        InterferometerSpec {
            transfer,
            loss_modes,
        }
    }
}

/// Largest singular value of the symmetric block `[[t, r], [r, t]]`.
pub fn symmetric_block_norm(t: Complex64, r: Complex64) -> f64 {
    (t + r).norm().max((t - r).norm())
}

/// Embeds the lossy symmetric beam splitter `B = [[t, r], [r, t]]` in a 4x4
/// unitary `[[B, D], [D, -B^†]]` with `D = (I - B^† B)^{1/2}`. Modes 0 and 1
/// are the signal ports, 2 and 3 the loss ports.
pub fn dilate_lossy_bs(t: Complex64, r: Complex64) -> Result<InterferometerSpec> {
    let norm = symmetric_block_norm(t, r);
    if norm > 1.0 + 1e-12 {
        return Err(Error::UnphysicalBeamSplitter { norm });
    }
    // B is normal with eigenvectors (1, +-1)/sqrt(2) and eigenvalues t +- r.
    let defect = |z: Complex64| (1.0 - z.norm_sqr()).max(0.0).sqrt();
    let (ds, da) = (defect(t + r), defect(t - r));
    let d_diag = c64((ds + da) / 2.0, 0.0);
    let d_off = c64((ds - da) / 2.0, 0.0);

    let mut w = DMatrix::zeros(4, 4);
    let block = [[t, r], [r, t]];
    let d = [[d_diag, d_off], [d_off, d_diag]];
    for i in 0..2 {
        for j in 0..2 {
            w[(i, j)] = block[i][j];
            w[(i, j + 2)] = d[i][j];
            w[(i + 2, j)] = d[i][j];
            w[(i + 2, j + 2)] = -block[j][i].conj();
        }
    }
    orthonormalize_columns(&mut w);
    InterferometerSpec::new(w, vec![2, 3])
}

/// Every occupation vector of `photons` bosons in `modes` modes, lexicographic.
pub fn occupations(photons: usize, modes: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, modes: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() + 1 == modes {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(left - k, modes, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if modes > 0 {
        rec(photons, modes, &mut Vec::with_capacity(modes), &mut out);
    }
    out
}

/// Output amplitudes for a Fock input of at most two photons.
pub fn fock_evolve_linear(
    spec: &InterferometerSpec,
    input: &[usize],
) -> Result<BTreeMap<Vec<usize>, Complex64>> {
    if input.len() != spec.n_modes() {
        return Err(Error::InvalidOccupation(format!(
            "input has {} modes, interferometer has {}",
            input.len(),
            spec.n_modes()
        )));
    }
    let photons: usize = input.iter().sum();
    if photons > MAX_LINEAR_PHOTONS {
        return Err(Error::UnsupportedScale {
            photons,
            max: MAX_LINEAR_PHOTONS,
        });
    }
    Ok(occupations(photons, spec.n_modes())
        .into_iter()
        .map(|out| {
            let amp = fock_amplitude(spec.transfer(), input, &out);
            (out, amp)
        })
        .collect())
}

/// Probability that `k` photons end in loss modes, `k = 0, 1, 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionStats {
    pub p_absorbed: [f64; 3],
}

impl AbsorptionStats {
    pub fn total(&self) -> f64 {
        self.p_absorbed.iter().sum()
    }
}

pub fn absorption_stats(
    spec: &InterferometerSpec,
    amplitudes: &BTreeMap<Vec<usize>, Complex64>,
) -> AbsorptionStats {
    let mut p = [0.0; 3];
    for (out, amp) in amplitudes {
        let lost: usize = spec.loss_modes().iter().map(|&m| out[m]).sum();
        p[lost.min(2)] += amp.norm_sqr();
    }
    AbsorptionStats { p_absorbed: p }
}

/// Two photons on the symmetric lossy beam splitter, one per input port.
/// Photon 2 carries the internal state `sqrt(d) |matched> + sqrt(1-d) |orthogonal>`
/// relative to photon 1, evolved coherently on the doubled mode space.
pub fn resch_experiment(t: Complex64, r: Complex64, distinguishability: f64) -> Result<AbsorptionStats> {
    let d = distinguishability;
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::InvalidDistinguishability(d));
    }
    let doubled = dilate_lossy_bs(t, r)?.with_internal_modes(2);
    // Mode (spatial, internal) = spatial * 2 + internal.
    let mut matched = vec![0; 8];
    matched[0] = 1;
    matched[2] = 1;
    let mut orthogonal = vec![0; 8];
    orthogonal[0] = 1;
    orthogonal[3] = 1;

    let out_matched = fock_evolve_linear(&doubled, &matched)?;
    let out_orthogonal = fock_evolve_linear(&doubled, &orthogonal)?;
    let (wm, wo) = (d.sqrt(), (1.0 - d).sqrt());
    let combined: BTreeMap<Vec<usize>, Complex64> = out_matched
        .into_iter()
        .map(|(occ, a)| {
            let b = out_orthogonal[&occ];
            (occ, a * wm + b * wo)
        })
        .collect();
    Ok(absorption_stats(&doubled, &combined))
}

/// Settings for [`ns_gate_search`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NsSearchConfig {
    pub seed: u64,
    pub restarts: usize,
    #[serde(default = "default_ns_evals")]
    pub evals_per_stage: usize,
    /// Required `1 - fidelity`.
    #[serde(default = "default_ns_infidelity")]
    pub infidelity_tol: f64,
}

fn default_ns_evals() -> usize {
    1500
}

fn default_ns_infidelity() -> f64 {
    1e-9
}

impl NsSearchConfig {
    pub fn new(seed: u64, restarts: usize) -> Self {
        NsSearchConfig {
            seed,
            restarts,
            evals_per_stage: default_ns_evals(),
            infidelity_tol: default_ns_infidelity(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NsGateResult {
    /// 3x3 transfer; mode 0 is the signal, modes 1 and 2 the ancillas.
    pub transfer: DMatrix<Complex64>,
    pub success_prob: f64,
    pub fidelity: f64,
    /// Postselected amplitudes for signal photon numbers 0, 1, 2.
    pub amplitudes: [Complex64; 3],
    pub restart: usize,
}

/// Postselected amplitudes `<n, 1, 0| U |n, 1, 0>` for `n = 0, 1, 2`.
pub fn ns_amplitudes(u: &DMatrix<Complex64>) -> [Complex64; 3] {
    [0usize, 1, 2].map(|n| fock_amplitude(u, &[n, 1, 0], &[n, 1, 0]))
}

/// `(fidelity, success probability)` of the postselected map against
/// `alpha|0> + beta|1> + gamma|2> -> lambda (alpha|0> + beta|1> - gamma|2>)`.
pub fn ns_figures(amps: &[Complex64; 3]) -> (f64, f64) {
    let overlap = amps[0] + amps[1] - amps[2];
    let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if norm_sqr == 0.0 {
        return (0.0, 0.0);
    }
    let fidelity = (overlap.norm_sqr() / (3.0 * norm_sqr)).min(1.0);
    (fidelity, overlap.norm_sqr() / 9.0)
}

/// Hermitian generator from 9 reals: 3 diagonal entries, then (re, im) of
/// the upper off-diagonal entries.
fn generator(x: &[f64]) -> DMatrix<Complex64> {
    let mut h = DMatrix::zeros(3, 3);
    for i in 0..3 {
        h[(i, i)] = c64(x[i], 0.0);
    }
    let mut k = 3;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let z = c64(x[k], x[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    h
}

fn unitary_from(x: &[f64]) -> DMatrix<Complex64> {
    hermitian_exp(&generator(x))
}

/// Relative defect of `c0 = c1 = -c2`.
fn ns_defect(amps: &[Complex64; 3]) -> f64 {
    let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if norm_sqr == 0.0 {
        return f64::INFINITY;
    }
    ((amps[0] - amps[1]).norm_sqr() + (amps[0] + amps[2]).norm_sqr()) / norm_sqr
}

fn ns_restart(config: &NsSearchConfig, index: usize) -> Option<NsGateResult> {
    let mut rng = substream(config.seed, index as u64);
    let x0: Vec<f64> = (0..9).map(|_| rng.random_range(-PI..PI)).collect();
    let nm = NelderMead {
        max_evals: config.evals_per_stage,
        f_tol: 1e-16,
        x_tol: 1e-12,
        f_target: f64::NEG_INFINITY,
    };
    let tol = config.infidelity_tol;
    let mut x = penalty_descent(&nm, x0, |p| {
        let (fidelity, success) = ns_figures(&ns_amplitudes(&unitary_from(p)));
        (success, ((1.0 - fidelity) - tol).max(0.0))
    });
    // Polish onto the exact NS relation.
    let polish = NelderMead {
        max_evals: config.evals_per_stage,
        f_tol: 0.0,
        x_tol: 1e-15,
        f_target: 1e-28,
    };
    let mut step = 1e-3;
    for _ in 0..4 {
        x = polish
            .minimize(|p| ns_defect(&ns_amplitudes(&unitary_from(p))), &x, step)
            .x;
        step *= 0.1;
    }
    let transfer = unitary_from(&x);
    let amplitudes = ns_amplitudes(&transfer);
    let (fidelity, success_prob) = ns_figures(&amplitudes);
    (1.0 - fidelity <= tol).then_some(NsGateResult {
        transfer,
        success_prob,
        fidelity,
        amplitudes,
        restart: index,
    })
}

/// Searches 3-mode interferometers (signal + two ancillas, ancilla input
/// `|1, 0>`, postselected on ancilla output `(1, 0)`) for the NS gate with the
/// highest success probability at the configured fidelity.
pub fn ns_gate_search(config: &NsSearchConfig) -> Result<NsGateResult> {
    if config.restarts == 0 {
        return Err(Error::InvalidTask("restarts must be positive".into()));
    }
    let results: Vec<Option<NsGateResult>> = (0..config.restarts)
        .into_par_iter()
        .map(|i| ns_restart(config, i))
        .collect();
    let mut best: Option<NsGateResult> = None;
    for r in results.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| r.success_prob > b.success_prob) {
            best = Some(r);
        }
    }
    best.ok_or(Error::NoFeasibleUnitary {
        infidelity: f64::NAN,
    })
}
