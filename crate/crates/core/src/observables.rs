//! Return probabilities, the nonlinear phase shift and its diagnostics.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{PulseSequence, SectorGenerators};
use crate::error::{Error, Result};
use crate::linalg::{fock_amplitude, unitarity_deviation};
use crate::sector::{enumerate_sector, DickeModel, Occupation, StateVector};

/// Probe amplitudes below this modulus leave the phase undefined.
pub const PHASE_TOLERANCE: f64 = 1e-8;

/// Which phase comparison defines the nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Cross-Kerr: `arg A11 - arg A10 - arg A01 + arg A00`.
    TwoMode,
    /// Self-Kerr on mode 1: `arg A2 - 2 arg A1 + arg A0`.
    OneMode,
}

impl Variant {
    /// Probe inputs with their integer weights in the phase combination.
    /// The last entry is the two-photon probe.
    pub fn probes(self) -> &'static [(&'static str, Occupation, i32)] {
        const TWO: [(&str, Occupation, i32); 4] = [
            ("00", Occupation::new(0, 0, 0), 1),
            ("10", Occupation::new(1, 0, 0), -1),
            ("01", Occupation::new(0, 1, 0), -1),
            ("11", Occupation::new(1, 1, 0), 1),
        ];
        const ONE: [(&str, Occupation, i32); 3] = [
            ("0", Occupation::new(0, 0, 0), 1),
            ("1", Occupation::new(1, 0, 0), -2),
            ("2", Occupation::new(2, 0, 0), 1),
        ];
        match self {
            Variant::TwoMode => &TWO,
            Variant::OneMode => &ONE,
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "two-mode" => Ok(Variant::TwoMode),
            "one-mode" => Ok(Variant::OneMode),
            other => Err(format!("unknown variant {other:?}")),
        }
    }
}

/// Diagonal element `<in| U |in>` for one probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeAmplitude {
    pub label: String,
    pub input: Occupation,
    pub re: f64,
    pub im: f64,
    pub return_probability: f64,
}

impl ProbeAmplitude {
    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionReport {
    /// Return probability of the principal state.
    pub p0: f64,
    pub p_loss: f64,
    /// `None` when some probe amplitude is below [`PHASE_TOLERANCE`].
    pub phi_nl: Option<f64>,
    pub per_input_return: BTreeMap<String, f64>,
    /// Max over probes of `1 - return probability`.
    pub composite_loss: f64,
    pub probes: Vec<ProbeAmplitude>,
}

/// Wraps to `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    let mut y = x % (2.0 * PI);
    if y <= -PI {
        y += 2.0 * PI;
    } else if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// `|<initial|final>|^2`.
pub fn return_probability(final_state: &StateVector, initial: &StateVector) -> Result<f64> {
    Ok(initial.inner(final_state)?.norm_sqr().min(1.0))
}

/// Reusable evaluator: sector generators for every probe, built once.
#[derive(Debug, Clone)]
pub struct ProbeSet {
    variant: Variant,
    sectors: Vec<SectorGenerators>,
}

impl ProbeSet {
    pub fn new(model: &DickeModel, variant: Variant) -> Self {
        let sectors = (0..=2)
            .map(|n| SectorGenerators::new(Arc::new(enumerate_sector(n, model)), model))
            .collect();
        ProbeSet { variant, sectors }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Raw probe amplitudes, in [`Variant::probes`] order.
    pub fn amplitudes(&self, seq: &PulseSequence) -> Vec<Complex64> {
        let probes = self.variant.probes();
        let mut out = vec![Complex64::new(0.0, 0.0); probes.len()];
        for gens in &self.sectors {
            let members: Vec<(usize, usize)> = probes
                .iter()
                .enumerate()
                .filter(|(_, p)| p.1.total() == gens.sector().n_exc())
                .map(|(k, p)| (k, gens.sector().index_of(p.1).expect("probe occupations have r = 0")))
                .collect();
            if members.is_empty() {
                continue;
            }
            let mut psis: Vec<DVector<Complex64>> = members
                .iter()
                .map(|&(_, idx)| {
                    let mut psi = DVector::zeros(gens.sector().len());
                    psi[idx] = Complex64::new(1.0, 0.0);
                    psi
                })
                .collect();
            gens.propagate_many(seq, &mut psis);
            for (&(k, idx), psi) in members.iter().zip(&psis) {
                out[k] = psi[idx];
            }
        }
        out
    }

    /// Composite loss and the wrapped phase (if defined), without building a report.
    pub fn loss_and_phase(&self, seq: &PulseSequence) -> (f64, Option<f64>) {
        let (losses, phase) = self.losses_and_phase(seq);
        (losses.into_iter().fold(0.0, f64::max), phase)
    }

    /// Per-probe losses `1 - |A|^2` and the wrapped phase.
    pub fn losses_and_phase(&self, seq: &PulseSequence) -> (Vec<f64>, Option<f64>) {
        let amps = self.amplitudes(seq);
        let losses = amps.iter().map(|a| 1.0 - a.norm_sqr().min(1.0)).collect();
        (losses, self.phase_from(&amps))
    }

    fn phase_from(&self, amps: &[Complex64]) -> Option<f64> {
        if amps.iter().any(|a| a.norm() < PHASE_TOLERANCE) {
            return None;
        }
        // arg of the weighted product equals the weighted sum of args mod 2 pi.
        let mut z = Complex64::new(1.0, 0.0);
        for (&(_, _, w), a) in self.variant.probes().iter().zip(amps) {
            let unit = a / a.norm();
            let f = if w >= 0 { unit } else { unit.conj() };
            for _ in 0..w.unsigned_abs() {
                z *= f;
            }
        }
        Some(wrap_phase(z.im.atan2(z.re)))
    }

    pub fn report(&self, seq: &PulseSequence) -> EvolutionReport {
        let amps = self.amplitudes(seq);
        let probes: Vec<ProbeAmplitude> = self
            .variant
            .probes()
            .iter()
            .zip(&amps)
            .map(|(&(label, input, _), a)| ProbeAmplitude {
                label: label.to_string(),
                input,
                re: a.re,
                im: a.im,
                return_probability: a.norm_sqr().min(1.0),
            })
            .collect();
        let per_input_return = probes
            .iter()
            .map(|p| (p.label.clone(), p.return_probability))
            .collect();
        let composite_loss = probes
            .iter()
            .map(|p| 1.0 - p.return_probability)
            .fold(0.0, f64::max);
        let p0 = probes.last().expect("variants have probes").return_probability;
        EvolutionReport {
            p0,
            p_loss: 1.0 - p0,
            phi_nl: self.phase_from(&amps),
            per_input_return,
            composite_loss,
            probes,
        }
    }
}

/// Report for the probe set of `variant`; `phi_nl` may be undefined.
pub fn probe_report(seq: &PulseSequence, model: &DickeModel, variant: Variant) -> EvolutionReport {
    ProbeSet::new(model, variant).report(seq)
}

/// Nonlinear phase shift of `seq`, failing when a probe is fully lost.
pub fn nonlinear_phase(
    seq: &PulseSequence,
    model: &DickeModel,
    variant: Variant,
) -> Result<(f64, EvolutionReport)> {
    let report = probe_report(seq, model, variant);
    match report.phi_nl {
        Some(phi) => Ok((phi, report)),
        None => {
            let worst = report
                .probes
                .iter()
                .min_by(|a, b| a.amplitude().norm().total_cmp(&b.amplitude().norm()))
                .expect("variants have probes");
            Err(Error::PhaseUndefined {
                probe: worst.label.clone(),
                modulus: worst.amplitude().norm(),
            })
        }
    }
}

/// Two-photon amplitude through a passive three-mode transfer (modes: photon 1,
/// photon 2, collective), with the collective mode empty at input and output.
pub fn bosonic_two_photon_amplitude(
    u: &DMatrix<Complex64>,
    input: (usize, usize),
    output: (usize, usize),
) -> Result<Complex64> {
    if u.nrows() != 3 || u.ncols() != 3 {
        return Err(Error::InvalidOccupation(format!(
            "transfer must be 3x3, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    let deviation = unitarity_deviation(u);
    if deviation > 1e-10 {
        return Err(Error::NotUnitary { deviation });
    }
    for (n1, n2) in [input, output] {
        if n1 + n2 != 2 {
            return Err(Error::InvalidOccupation(format!(
                "occupation ({n1}, {n2}) must carry two photons"
            )));
        }
    }
    Ok(fock_amplitude(u, &[input.0, input.1, 0], &[output.0, output.1, 0]))
}

/// Product of the two unnormalized matrix elements taking `|2,0,0> -> |1,0,1> -> |0,0,2>`
/// at coupling `eps`: `2 N sqrt(N (N-1)) eps^2`.
pub fn two_photon_coupling_product(n_atoms: usize, eps: f64) -> f64 {
    let n = n_atoms as f64;
    // <r+1| R+ |r> = sqrt((r+1)(N-r)) without the 1/sqrt(N) normalization.
    let ladder = |r: usize| (((r + 1) * n_atoms.saturating_sub(r)) as f64).sqrt();
    let first = n.sqrt() * eps * 2f64.sqrt() * ladder(0);
    let second = n.sqrt() * eps * 1.0 * ladder(1);
    first * second
}
