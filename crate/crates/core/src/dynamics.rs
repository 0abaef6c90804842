//! Interaction Hamiltonian and exact piecewise-constant evolution.
//!
//! `H = sum_m g_m (e^{i theta_m} C_m + e^{-i theta_m} C_m^T)` with `C_m` the
//! sector matrix of `R+ a_m / sqrt(N)` and `g_m = N eps_m`. Drive phases
//! `theta_m` default to zero, where `H` is real symmetric. Units have `hbar = 1`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sector::{coupling_matrix, DickeModel, PhotonMode, SectorBasis, StateVector};

pub const DEFAULT_COUPLING_BOUND: f64 = 10.0;

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

/// One constant-drive interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSegment {
    pub g1: f64,
    pub g2: f64,
    pub duration: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub phase1: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub phase2: f64,
}

impl PulseSegment {
    pub const fn new(g1: f64, g2: f64, duration: f64) -> Self {
        PulseSegment {
            g1,
            g2,
            duration,
            phase1: 0.0,
            phase2: 0.0,
        }
    }

    pub const fn with_phases(mut self, phase1: f64, phase2: f64) -> Self {
        self.phase1 = phase1;
        self.phase2 = phase2;
        self
    }

    pub fn is_idle(&self) -> bool {
        (self.g1 == 0.0 && self.g2 == 0.0) || self.duration == 0.0
    }

    pub fn is_real(&self) -> bool {
        self.phase1 == 0.0 && self.phase2 == 0.0
    }
}

/// Ordered pulse segments. Empty means identity.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSequence {
    pub segments: Vec<PulseSegment>,
}

impl PulseSequence {
    pub fn new(segments: Vec<PulseSegment>) -> Self {
        PulseSequence { segments }
    }

    pub fn single(g1: f64, g2: f64, duration: f64) -> Self {
        Self::new(vec![PulseSegment::new(g1, g2, duration)])
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn reversed(&self) -> Self {
        Self::new(self.segments.iter().rev().copied().collect())
    }

    pub fn is_real(&self) -> bool {
        self.segments.iter().all(PulseSegment::is_real)
    }

    pub fn validate(&self, coupling_bound: f64) -> Result<()> {
        for (i, s) in self.segments.iter().enumerate() {
            if !(s.duration >= 0.0 && s.duration.is_finite()) {
                return Err(Error::InvalidTask(format!(
                    "segment {i}: duration {} must be finite and non-negative",
                    s.duration
                )));
            }
            if !(s.g1.abs() <= coupling_bound && s.g2.abs() <= coupling_bound) {
                return Err(Error::InvalidTask(format!(
                    "segment {i}: couplings ({}, {}) exceed bound {coupling_bound}",
                    s.g1, s.g2
                )));
            }
            if !(s.phase1.is_finite() && s.phase2.is_finite()) {
                return Err(Error::InvalidTask(format!("segment {i}: drive phases must be finite")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    pub sector: Arc<SectorBasis>,
    pub matrix: DMatrix<Complex64>,
}

impl HamiltonianMatrix {
    /// Largest entrywise `|H - H^dagger|`.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Eigenpairs of one segment Hamiltonian.
struct Spectrum {
    values: DVector<f64>,
    vectors: DMatrix<Complex64>,
}

impl Spectrum {
    /// `psi <- V exp(-i Lambda t) V^dagger psi`.
    fn apply(&self, t: f64, psi: &mut DVector<Complex64>) {
        let v = &self.vectors;
        let dim = v.nrows();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); dim];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..dim {
                acc += v[(i, j)].conj() * psi[i];
            }
            *c = acc * Complex64::from_polar(1.0, -self.values[j] * t);
        }
        for i in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, c) in coeffs.iter().enumerate() {
                acc += v[(i, j)] * c;
            }
            psi[i] = acc;
        }
    }
}

/// The drive matrices `C_m` of one sector.
#[derive(Debug, Clone)]
pub struct SectorGenerators {
    sector: Arc<SectorBasis>,
    absorb1: DMatrix<f64>,
    absorb2: DMatrix<f64>,
}

impl SectorGenerators {
    pub fn new(sector: Arc<SectorBasis>, model: &DickeModel) -> Self {
        let absorb1 = coupling_matrix(PhotonMode::One, &sector, model);
        let absorb2 = coupling_matrix(PhotonMode::Two, &sector, model);
        SectorGenerators {
            sector,
            absorb1,
            absorb2,
        }
    }

    pub fn sector(&self) -> &Arc<SectorBasis> {
        &self.sector
    }

    fn real_hamiltonian(&self, g1: f64, g2: f64) -> DMatrix<f64> {
        let h = &self.absorb1 * g1 + &self.absorb2 * g2;
        &h + h.transpose()
    }

    pub fn hamiltonian(&self, seg: &PulseSegment) -> DMatrix<Complex64> {
        let e1 = Complex64::from_polar(seg.g1, seg.phase1);
        let e2 = Complex64::from_polar(seg.g2, seg.phase2);
        let c = self.absorb1.map(|x| e1 * x) + self.absorb2.map(|x| e2 * x);
        &c + c.adjoint()
    }

    fn spectrum(&self, seg: &PulseSegment) -> Spectrum {
        if seg.is_real() {
            let eig = SymmetricEigen::new(self.real_hamiltonian(seg.g1, seg.g2));
            Spectrum {
                values: eig.eigenvalues,
                vectors: eig.eigenvectors.map(|x| Complex64::new(x, 0.0)),
            }
        } else {
            let eig = SymmetricEigen::new(self.hamiltonian(seg));
            Spectrum {
                values: eig.eigenvalues,
                vectors: eig.eigenvectors,
            }
        }
    }

    /// Applies `prod_k exp(-i H_k t_k)` to `psi` in place.
    pub fn propagate(&self, seq: &PulseSequence, psi: &mut DVector<Complex64>) {
        self.propagate_many(seq, std::slice::from_mut(psi));
    }

    /// Like [`propagate`](Self::propagate) for several states, diagonalizing each segment once.
    pub fn propagate_many(&self, seq: &PulseSequence, psis: &mut [DVector<Complex64>]) {
        for seg in &seq.segments {
            self.propagate_segment(seg, psis);
        }
    }

    fn propagate_segment(&self, seg: &PulseSegment, psis: &mut [DVector<Complex64>]) {
        if seg.is_idle() || self.sector.len() < 2 {
            return;
        }
        let spectrum = self.spectrum(seg);
        for psi in psis.iter_mut() {
            spectrum.apply(seg.duration, psi);
        }
    }

    /// Dense `prod_k exp(-i H_k t_k)` on this sector.
    pub fn unitary(&self, seq: &PulseSequence) -> DMatrix<Complex64> {
        let dim = self.sector.len();
        let mut columns: Vec<DVector<Complex64>> = (0..dim)
            .map(|j| {
                let mut e = DVector::zeros(dim);
                e[j] = Complex64::new(1.0, 0.0);
                e
            })
            .collect();
        self.propagate_many(seq, &mut columns);
        DMatrix::from_columns(&columns)
    }
}

pub fn build_hamiltonian(
    seg: &PulseSegment,
    sector: &Arc<SectorBasis>,
    model: &DickeModel,
) -> HamiltonianMatrix {
    let gens = SectorGenerators::new(Arc::clone(sector), model);
    HamiltonianMatrix {
        sector: Arc::clone(sector),
        matrix: gens.hamiltonian(seg),
    }
}

/// `exp(-i H t)` as a dense matrix.
pub fn segment_propagator(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let dim = h.nrows();
    let eig = SymmetricEigen::new(h.clone());
    let spectrum = Spectrum {
        values: eig.eigenvalues,
        vectors: eig.eigenvectors,
    };
    let mut u = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut e = DVector::zeros(dim);
        e[col] = Complex64::new(1.0, 0.0);
        spectrum.apply(t, &mut e);
        u.set_column(col, &e);
    }
    u
}

/// Evolves `initial` through `seq`. The trajectory holds the state at every
/// segment boundary, starting with `initial` and ending with the final state.
pub fn evolve_sequence(
    seq: &PulseSequence,
    initial: &StateVector,
    model: &DickeModel,
) -> (StateVector, Vec<StateVector>) {
    let gens = SectorGenerators::new(Arc::clone(initial.sector()), model);
    let mut psi = initial.amplitudes().clone();
    let mut trajectory = Vec::with_capacity(seq.len() + 1);
    trajectory.push(initial.clone());
    for seg in &seq.segments {
        gens.propagate_segment(seg, std::slice::from_mut(&mut psi));
        trajectory.push(StateVector::from_amplitudes(Arc::clone(initial.sector()), psi.clone()));
    }
    let final_state = StateVector::from_amplitudes(Arc::clone(initial.sector()), psi);
    (final_state, trajectory)
}

/// Raman coupling after adiabatic elimination of the far-detuned level 3:
/// `eps = g3 * omega_l / delta`.
pub fn effective_coupling(g3: f64, omega_l: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::ResonantDetuning);
    }
    Ok(g3 * omega_l / delta)
}
