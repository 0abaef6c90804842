//! Sector enumeration, ladder coefficients and coupling matrices.
use pxlab::sector::{coupling_matrix, dicke_step_coeff, enumerate_sector, DickeModel, PhotonMode};

fn main() {
    for model in [DickeModel::finite(1), DickeModel::finite(2), DickeModel::bosonic()] {
        let sector = enumerate_sector(2, &model);
        println!("N = {}: {} states in the two-excitation sector", model.n_atoms, sector.len());
        for occ in sector.states() {
            println!("  ({}, {}, {})", occ.n1, occ.n2, occ.r);
        }
        let c1 = coupling_matrix(PhotonMode::One, &sector, &model);
        println!("  C1 = {c1:.4}");
    }
    for n in [2, 8, 64, 1024] {
        let c = dicke_step_coeff(1, &DickeModel::finite(n)).unwrap();
        println!("c(1, N = {n}) = {c:.6}");
    }
    println!("c(1, inf) = {:.6}", dicke_step_coeff(1, &DickeModel::bosonic()).unwrap());
}
