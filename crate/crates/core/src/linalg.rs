//! Small dense helpers: permanents, Fock amplitudes, Hermitian exponentials.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Permanent by Ryser's inclusion-exclusion formula. Intended for the
/// handful of photons simulated here; cost grows as `n^2 2^n`.
pub fn permanent(m: &DMatrix<Complex64>) -> Complex64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "permanent requires a square matrix");
    let mut total = c64(0.0, 0.0);
    for subset in 1..(1usize << n) {
        let prod: Complex64 = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|j| subset & (1 << j) != 0)
                    .map(|j| m[(i, j)])
                    .sum::<Complex64>()
            })
            .product();
        if (n - subset.count_ones() as usize).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if n == 0 {
        c64(1.0, 0.0)
    } else {
        total
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Expands an occupation vector into a list of mode indices, one per photon.
pub fn occupied_modes(occ: &[usize]) -> Vec<usize> {
    occ.iter()
        .enumerate()
        .flat_map(|(mode, &n)| std::iter::repeat_n(mode, n))
        .collect()
}

/// `<out| U |in>` for single-particle transfer `u` (`a_in^† -> sum_o u[o][in] a_o^†`).
///
/// Panics if the photon numbers of `input` and `output` differ.
pub fn fock_amplitude(u: &DMatrix<Complex64>, input: &[usize], output: &[usize]) -> Complex64 {
    let cols = occupied_modes(input);
    let rows = occupied_modes(output);
    assert_eq!(rows.len(), cols.len(), "photon number is conserved");
    let sub = DMatrix::from_fn(rows.len(), cols.len(), |i, j| u[(rows[i], cols[j])]);
    let norm: f64 = input.iter().chain(output).map(|&n| factorial(n)).product();
    permanent(&sub) / norm.sqrt()
}

/// Max entrywise deviation of `u^† u` from the identity.
pub fn unitarity_deviation(u: &DMatrix<Complex64>) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let g = u.adjoint() * u;
    let n = g.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

/// `exp(-i h)` for Hermitian `h`.
pub fn hermitian_exp(h: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(h.clone());
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -l)),
    );
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&phases) * v.adjoint()
}

/// Gram-Schmidt on the columns of `m`, left to right, in place.
pub fn orthonormalize_columns(m: &mut DMatrix<Complex64>) {
    for j in 0..m.ncols() {
        let mut col = m.column(j).into_owned();
        for k in 0..j {
            let prev = m.column(k);
            let proj = prev.dotc(&col);
            col -= prev * proj;
        }
        let norm = col.norm();
        m.set_column(j, &(col / c64(norm, 0.0)));
    }
}
