//! Effective Raman coupling and the matching Hamiltonian element.
use std::sync::Arc;

use pxlab::dynamics::{build_hamiltonian, effective_coupling, PulseSegment};
use pxlab::sector::{enumerate_sector, DickeModel, Occupation};

fn main() {
    let (g3, omega) = (1.0, 2.0);
    for delta in [10.0, 100.0, 1000.0] {
        println!("delta = {delta:>6}: eps = {:.6}", effective_coupling(g3, omega, delta).unwrap());
    }
    if let Err(e) = effective_coupling(g3, omega, 0.0) {
        println!("delta = 0: {e}");
    }
    let n = 4;
    let model = DickeModel::finite(n);
    let eps = effective_coupling(g3, omega, 10.0).unwrap();
    let sector = Arc::new(enumerate_sector(1, &model));
    let h = build_hamiltonian(&PulseSegment::new(n as f64 * eps, 0.0, 1.0), &sector, &model);
    let i = sector.index_of(Occupation::new(0, 0, 1)).unwrap();
    let j = sector.index_of(Occupation::new(1, 0, 0)).unwrap();
    println!("N = {n}, g = N eps = {:.3}: <0,0,1|H|1,0,0> = {:.6}", n as f64 * eps, h.matrix[(i, j)].re);
}
