//! Small dense Hermitian helpers shared by the reduction and measure code.

use nalgebra::{DMatrix, DVector};

use crate::qreg::{C64, ZERO};

/// Eigenvalues below this are treated as zero in entropy sums.
pub const EIGEN_CLIP: f64 = 1e-12;

pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    if m.nrows() == 1 {
        return vec![m[(0, 0)].re];
    }
    symmetrize(m).symmetric_eigenvalues().iter().copied().collect()
}

pub fn hermitian_eigh(m: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let eig = symmetrize(m).symmetric_eigen();
    (eig.eigenvalues, eig.eigenvectors)
}

/// `(M + M^dagger) / 2`, so round-off asymmetry never reaches the solver.
fn symmetrize(m: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = m.clone();
    let n = m.nrows();
    for i in 0..n {
        out[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    out
}

/// Von Neumann entropy in bits of a spectrum, clipping to `[0, 1]`.
pub fn entropy_bits(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .map(|&l| l.min(1.0))
        .filter(|&l| l > EIGEN_CLIP)
        .map(|l| -l * l.log2())
        .sum()
}

/// Orthonormal basis for the column span of `vectors`, via two passes of
/// modified Gram-Schmidt. Columns whose residual norm falls below `cutoff`
/// are dropped.
pub fn orthonormal_span(vectors: &[&[C64]], cutoff: f64) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.to_vec();
        let scale = crate::qreg::norm(&w);
        for _ in 0..2 {
            for q in &basis {
                let c = crate::qreg::inner(q, &w);
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let n = crate::qreg::norm(&w);
        if n > cutoff && n > scale * 1e-10 {
            w.iter_mut().for_each(|x| *x /= n);
            basis.push(w);
        }
    }
    basis
}

/// Column `j` of a matrix as an owned vector.
pub fn column(m: &DMatrix<C64>, j: usize) -> Vec<C64> {
    m.column(j).iter().copied().collect()
}

/// `Q^dagger B` for an orthonormal basis `Q` given as columns.
pub fn project(basis: &[Vec<C64>], factor: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = DMatrix::from_element(basis.len(), factor.ncols(), ZERO);
    for (i, q) in basis.iter().enumerate() {
        for j in 0..factor.ncols() {
            out[(i, j)] = factor
                .column(j)
                .iter()
                .zip(q)
                .map(|(b, qq)| qq.conj() * b)
                .sum();
        }
    }
    out
}
