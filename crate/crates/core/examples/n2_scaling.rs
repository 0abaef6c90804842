//! Product of the two sequential matrix elements |2,0,0> -> |1,0,1> -> |0,0,2>.
use pxlab::observables::two_photon_coupling_product;

fn main() {
    let mut n = 1;
    while n <= 4096 {
        let m = two_photon_coupling_product(n, 1.0);
        let ratio = two_photon_coupling_product(2 * n, 1.0) / m;
        println!("N = {n:>5}  M = {m:>14.4}  M(2N)/M(N) = {ratio:.5}");
        n *= 2;
    }
}
