//! Excitation-number sectors of two photon modes plus one collective Dicke mode.
//!
//! The interaction conserves `n1 + n2 + r`, so every computation happens inside
//! a single sector. States are ordered lexicographically on `(n1, n2, r)`.
//!
//! Ladder coefficients use the normalized collective operator `R+ / sqrt(N)`:
//! `<r+1| R+ / sqrt(N) |r> = sqrt((r+1)(N-r)/N)`, which tends to the harmonic
//! value `sqrt(r+1)` as `N -> inf`. Physical couplings map as `g = N * eps`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of atoms in the medium, or the bosonic (harmonic) limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomNumber {
    Finite(usize),
    Bosonic,
}

impl AtomNumber {
    pub fn finite(n: usize) -> Option<Self> {
        (n > 0).then_some(AtomNumber::Finite(n))
    }

    /// Largest collective excitation count, `None` when unbounded.
    pub fn max_excitations(self) -> Option<usize> {
        match self {
            AtomNumber::Finite(n) => Some(n),
            AtomNumber::Bosonic => None,
        }
    }
}

impl fmt::Display for AtomNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomNumber::Finite(n) => write!(f, "{n}"),
            AtomNumber::Bosonic => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for AtomNumber {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(AtomNumber::Bosonic),
            other => other
                .parse::<usize>()
                .ok()
                .and_then(AtomNumber::finite)
                .ok_or_else(|| format!("atom number must be a positive integer or \"inf\", got {other:?}")),
        }
    }
}

/// Serialized as an integer or the string `"inf"`.
impl Serialize for AtomNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AtomNumber::Finite(n) => s.serialize_u64(*n as u64),
            AtomNumber::Bosonic => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for AtomNumber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Str(String),
        }
        let raw = Raw::deserialize(d)?;
        match raw {
            Raw::Int(n) => AtomNumber::finite(n as usize)
                .ok_or_else(|| serde::de::Error::custom("atom number must be positive")),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Atomic medium with a single symmetric collective mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DickeModel {
    pub n_atoms: AtomNumber,
    /// Label of the Dicke wave vector `p`. Metadata only.
    #[serde(default = "default_label")]
    pub wave_vector_label: String,
}

fn default_label() -> String {
    "p".to_string()
}

impl DickeModel {
    pub fn new(n_atoms: AtomNumber) -> Self {
        DickeModel {
            n_atoms,
            wave_vector_label: default_label(),
        }
    }

    /// Panics if `n == 0`.
    pub fn finite(n: usize) -> Self {
        Self::new(AtomNumber::finite(n).expect("atom number must be positive"))
    }

    pub fn bosonic() -> Self {
        Self::new(AtomNumber::Bosonic)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.wave_vector_label = label.into();
        self
    }
}

/// Occupation triple `|n1, n2, r>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Occupation {
    pub n1: usize,
    pub n2: usize,
    pub r: usize,
}

impl Occupation {
    pub const fn new(n1: usize, n2: usize, r: usize) -> Self {
        Occupation { n1, n2, r }
    }

    pub const fn total(self) -> usize {
        self.n1 + self.n2 + self.r
    }

    /// Photon count in mode 1 or 2.
    pub fn photons(self, mode: PhotonMode) -> usize {
        match mode {
            PhotonMode::One => self.n1,
            PhotonMode::Two => self.n2,
        }
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{},{}>", self.n1, self.n2, self.r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhotonMode {
    One,
    Two,
}

/// Ordered basis of one excitation sector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    n_exc: usize,
    states: Vec<Occupation>,
}

impl SectorBasis {
    pub fn n_exc(&self) -> usize {
        self.n_exc
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, occ: Occupation) -> Option<usize> {
        self.states.binary_search(&occ).ok()
    }
}

/// Enumerates every `(n1, n2, r)` with `n1 + n2 + r = n_exc`, dropping states
/// with `r > N` for a finite medium.
pub fn enumerate_sector(n_exc: usize, model: &DickeModel) -> SectorBasis {
    let r_max = model.n_atoms.max_excitations().unwrap_or(usize::MAX);
    let mut states = Vec::new();
    for n1 in 0..=n_exc {
        for n2 in 0..=(n_exc - n1) {
            let r = n_exc - n1 - n2;
            if r <= r_max {
                states.push(Occupation::new(n1, n2, r));
            }
        }
    }
    SectorBasis { n_exc, states }
}

/// `<r+1| R+ / sqrt(N) |r>`; zero once the ladder saturates at `r = N`.
pub fn dicke_step_coeff(r: usize, model: &DickeModel) -> Result<f64> {
    match model.n_atoms {
        AtomNumber::Bosonic => Ok(((r + 1) as f64).sqrt()),
        AtomNumber::Finite(n) if r > n => Err(Error::LadderOutOfRange { r, n_atoms: n }),
        AtomNumber::Finite(n) => {
            // (r+1)(N-r)/N, integer product first so r = 0 gives exactly 1.
            let num = ((r + 1) * (n - r)) as f64;
            Ok((num / n as f64).sqrt())
        }
    }
}

/// Matrix of `R+ a_m` restricted to a sector: absorbs one photon from `mode`
/// into the collective mode.
pub fn coupling_matrix(mode: PhotonMode, sector: &SectorBasis, model: &DickeModel) -> DMatrix<f64> {
    let dim = sector.len();
    let mut c = DMatrix::zeros(dim, dim);
    for (col, &src) in sector.states().iter().enumerate() {
        let photons = src.photons(mode);
        if photons == 0 {
            continue;
        }
        let dst = match mode {
            PhotonMode::One => Occupation::new(src.n1 - 1, src.n2, src.r + 1),
            PhotonMode::Two => Occupation::new(src.n1, src.n2 - 1, src.r + 1),
        };
        // A target outside the basis means r + 1 > N, where the coefficient is zero.
        if let Some(row) = sector.index_of(dst) {
            let ladder = dicke_step_coeff(src.r, model).expect("basis states respect r <= N");
            c[(row, col)] = ladder * (photons as f64).sqrt();
        }
    }
    c
}

/// Amplitudes over a sector basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    sector: Arc<SectorBasis>,
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    /// Basis state `occ` in its own sector.
    pub fn basis(occ: Occupation, model: &DickeModel) -> Result<Self> {
        let sector = Arc::new(enumerate_sector(occ.total(), model));
        Self::basis_in(occ, sector)
    }

    pub fn basis_in(occ: Occupation, sector: Arc<SectorBasis>) -> Result<Self> {
        let idx = sector.index_of(occ).ok_or(Error::NotInSector {
            n1: occ.n1,
            n2: occ.n2,
            r: occ.r,
            n_exc: sector.n_exc(),
        })?;
        let mut amplitudes = DVector::zeros(sector.len());
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(StateVector { sector, amplitudes })
    }

    /// Panics if the amplitude length does not match the sector.
    pub fn from_amplitudes(sector: Arc<SectorBasis>, amplitudes: DVector<Complex64>) -> Self {
        assert_eq!(sector.len(), amplitudes.len(), "amplitude vector does not match sector");
        StateVector { sector, amplitudes }
    }

    pub fn sector(&self) -> &Arc<SectorBasis> {
        &self.sector
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, occ: Occupation) -> Complex64 {
        self.sector
            .index_of(occ)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.sector != other.sector {
            return Err(Error::SectorMismatch {
                left: self.sector.n_exc(),
                right: other.sector.n_exc(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_count(n_exc: usize, r_max: usize) -> usize {
        let mut count = 0;
        for a in 0..=n_exc {
            for b in 0..=n_exc {
                for c in 0..=n_exc {
                    if a + b + c == n_exc && c <= r_max {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn vacuum_is_singleton() {
        for model in [DickeModel::finite(1), DickeModel::finite(5), DickeModel::bosonic()] {
            let s = enumerate_sector(0, &model);
            assert_eq!(s.states(), &[Occupation::new(0, 0, 0)]);
        }
    }

    #[test]
    fn single_excitation_order() {
        let s = enumerate_sector(1, &DickeModel::finite(2));
        assert_eq!(
            s.states(),
            &[Occupation::new(0, 0, 1), Occupation::new(0, 1, 0), Occupation::new(1, 0, 0)]
        );
    }

    #[test]
    fn sector_sizes_match_enumeration() {
        assert_eq!(brute_force_count(2, 2), 6);
        assert_eq!(brute_force_count(2, 1), 5);
        assert_eq!(enumerate_sector(2, &DickeModel::finite(2)).len(), 6);
        assert_eq!(enumerate_sector(2, &DickeModel::finite(1)).len(), 5);
        assert!(enumerate_sector(2, &DickeModel::finite(1))
            .index_of(Occupation::new(0, 0, 2))
            .is_none());
        for n_exc in 0..7 {
            for n in 1..5 {
                assert_eq!(
                    enumerate_sector(n_exc, &DickeModel::finite(n)).len(),
                    brute_force_count(n_exc, n)
                );
            }
            assert_eq!(
                enumerate_sector(n_exc, &DickeModel::bosonic()).len(),
                brute_force_count(n_exc, usize::MAX)
            );
        }
    }

    #[test]
    fn ladder_values() {
        let inf = DickeModel::bosonic();
        let two = DickeModel::finite(2);
        assert_eq!(dicke_step_coeff(0, &inf).unwrap(), 1.0);
        assert_eq!(dicke_step_coeff(0, &DickeModel::finite(7)).unwrap(), 1.0);
        assert_eq!(dicke_step_coeff(1, &inf).unwrap(), 2f64.sqrt());
        assert_eq!(dicke_step_coeff(1, &two).unwrap(), 1.0);
        assert_eq!(dicke_step_coeff(2, &two).unwrap(), 0.0);
        assert_eq!(dicke_step_coeff(1, &DickeModel::finite(1)).unwrap(), 0.0);
        assert_eq!(
            dicke_step_coeff(3, &two),
            Err(Error::LadderOutOfRange { r: 3, n_atoms: 2 })
        );
    }

    #[test]
    fn coupling_matrix_elements() {
        let two = DickeModel::finite(2);
        let vac = enumerate_sector(0, &two);
        assert!(coupling_matrix(PhotonMode::One, &vac, &two).iter().all(|&x| x == 0.0));

        let s1 = enumerate_sector(1, &two);
        let c1 = coupling_matrix(PhotonMode::One, &s1, &two);
        let to = s1.index_of(Occupation::new(0, 0, 1)).unwrap();
        let from = s1.index_of(Occupation::new(1, 0, 0)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if (i, j) == (to, from) { 1.0 } else { 0.0 };
                assert_eq!(c1[(i, j)], expect);
            }
        }

        let inf = DickeModel::bosonic();
        let s2 = enumerate_sector(2, &inf);
        let c1 = coupling_matrix(PhotonMode::One, &s2, &inf);
        let to = s2.index_of(Occupation::new(0, 0, 2)).unwrap();
        let from = s2.index_of(Occupation::new(1, 0, 1)).unwrap();
        assert_eq!(c1[(to, from)], 2f64.sqrt());
    }

    #[test]
    fn atom_number_parsing() {
        assert_eq!("inf".parse::<AtomNumber>().unwrap(), AtomNumber::Bosonic);
        assert_eq!("4".parse::<AtomNumber>().unwrap(), AtomNumber::Finite(4));
        assert!("0".parse::<AtomNumber>().is_err());
        let m: DickeModel = serde_json::from_str(r#"{"n_atoms":"inf"}"#).unwrap();
        assert_eq!(m.n_atoms, AtomNumber::Bosonic);
        let m: DickeModel = serde_json::from_str(r#"{"n_atoms":3,"wave_vector_label":"k1+k2"}"#).unwrap();
        assert_eq!(m.n_atoms, AtomNumber::Finite(3));
        assert!(serde_json::from_str::<DickeModel>(r#"{"n_atoms":0}"#).is_err());
    }

    #[test]
    fn inner_product_rejects_mixed_sectors() {
        let m = DickeModel::finite(2);
        let a = StateVector::basis(Occupation::new(1, 0, 0), &m).unwrap();
        let b = StateVector::basis(Occupation::new(1, 1, 0), &m).unwrap();
        assert!(matches!(a.inner(&b), Err(Error::SectorMismatch { .. })));
        assert_eq!(a.inner(&a).unwrap(), Complex64::new(1.0, 0.0));
    }
}
