//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

const Z0: C64 = C64::new(0.0, 0.0);
const O1: C64 = C64::new(1.0, 0.0);

fn pauli(c: char) -> DMatrix<C64> {
    let i = C64::new(0.0, 1.0);
    match c {
        'I' => DMatrix::from_row_slice(2, 2, &[O1, Z0, Z0, O1]),
        'X' => DMatrix::from_row_slice(2, 2, &[Z0, O1, O1, Z0]),
        'Y' => DMatrix::from_row_slice(2, 2, &[Z0, -i, i, Z0]),
        'Z' => DMatrix::from_row_slice(2, 2, &[O1, Z0, Z0, -O1]),
        _ => unreachable!(),
    }
}

/// Kronecker product of single-qubit operators; qubit 0 is the least
/// significant bit, so it is the rightmost factor.
fn string_op(n_qubits: usize, ops: &[(usize, char)]) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(1, 1, O1);
    for q in (0..n_qubits).rev() {
        let c = ops.iter().find(|(k, _)| *k == q).map_or('I', |(_, c)| *c);
        m = m.kronecker(&pauli(c));
    }
    m
}

/// Dense Hamiltonian assembled from Kronecker products: qubit 0 couples to
/// the first site of each chain (chain a = 1..N, chain b = N+1..2N).
pub fn kron_hamiltonian(n: usize, j_se: f64, j_e: f64) -> DMatrix<C64> {
    let nq = 2 * n + 1;
    let dim = 1 << nq;
    let mut h = DMatrix::from_element(dim, dim, Z0);
    let mut add = |coef: f64, p: usize, q: usize, c: char| {
        h += string_op(nq, &[(p, c), (q, c)]) * C64::new(coef, 0.0);
    };
    for start in [1, n + 1] {
        add(2.0 * j_se, 0, start, 'Z');
        add(j_se, 0, start, 'X');
        add(j_se, 0, start, 'Y');
        for k in 0..n - 1 {
            add(2.0 * j_e, start + k, start + k + 1, 'Z');
            add(-j_e, start + k, start + k + 1, 'X');
            add(-j_e, start + k, start + k + 1, 'Y');
        }
    }
    h
}

/// `exp(-i H t)` from the eigendecomposition of a Hermitian matrix.
pub fn expm_hermitian(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let eig = h.clone().symmetric_eigen();
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, -l * t)),
    );
    &eig.eigenvectors * DMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint()
}

/// Reduced density matrix by summing over all index pairs that agree on the
/// traced-out qubits.
pub fn naive_partial_trace(amps: &[C64], keep: &[usize]) -> DMatrix<C64> {
    let k = keep.len();
    let mut rho = DMatrix::from_element(1 << k, 1 << k, Z0);
    let local = |g: usize| {
        keep.iter()
            .enumerate()
            .fold(0, |acc, (j, &q)| acc | (((g >> q) & 1) << j))
    };
    let mask: usize = keep.iter().map(|q| 1 << q).sum();
    for a in 0..amps.len() {
        for b in 0..amps.len() {
            if a & !mask == b & !mask {
                rho[(local(a), local(b))] += amps[a] * amps[b].conj();
            }
        }
    }
    rho
}

/// Reduced state of a single qubit as a Bloch vector, by direct summation.
pub fn qubit_bloch(amps: &[C64], q: usize) -> [f64; 3] {
    let bit = 1 << q;
    let (mut p0, mut p1, mut coh) = (0.0, 0.0, Z0);
    for (i, a) in amps.iter().enumerate() {
        if i & bit == 0 {
            p0 += a.norm_sqr();
            coh += amps[i | bit] * a.conj();
        } else {
            p1 += a.norm_sqr();
        }
    }
    // rho_10 = coh, so x = 2 Re rho_10, y = 2 Im rho_10.
    [2.0 * coh.re, 2.0 * coh.im, p0 - p1]
}

pub fn bloch_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    0.5 * ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Von Neumann entropy (bits) of a qubit with Bloch vector `r`.
pub fn qubit_entropy(r: [f64; 3]) -> f64 {
    let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt().min(1.0);
    let h = |p: f64| if p <= 1e-15 { 0.0 } else { -p * p.log2() };
    h((1.0 + len) / 2.0) + h((1.0 - len) / 2.0)
}

pub fn random_amplitudes(dim: usize, seed: u64) -> Vec<C64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}
