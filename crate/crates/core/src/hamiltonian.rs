//! Model Hamiltonian as a list of Pauli strings, applied matrix-free.

use std::fmt;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qreg::{Chain, PureState, QubitLayout, C64, I, ONE, ZERO};

/// Intra-chain coupling of the physical platform in rad/s. Only used to
/// label output axes; all dynamics run in units of `J_E`.
pub const J_E_PHYSICAL: f64 = 700.0;

/// Largest register `build_dense` will allocate.
pub const DENSE_HAMILTONIAN_QUBITS: usize = 12;

/// Chunk size for the parallel kernel; small registers run on one thread.
const PAR_CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub layout: QubitLayout,
    pub j_se: f64,
    pub j_e: f64,
}

impl ModelParams {
    pub fn new(layout: QubitLayout, j_se: f64, j_e: f64) -> Result<Self> {
        if !(j_e.is_finite() && j_e > 0.0) {
            return Err(Error::InvalidParams(format!("J_E must be > 0, got {j_e}")));
        }
        if !(j_se.is_finite() && j_se >= 0.0) {
            return Err(Error::InvalidParams(format!("J_SE must be >= 0, got {j_se}")));
        }
        Ok(Self { layout, j_se, j_e })
    }

    /// Couplings in units of `J_E`, so time is `t = J_E * tau`.
    pub fn dimensionless(n_per_chain: usize, ratio: f64) -> Result<Self> {
        Self::new(QubitLayout::new(n_per_chain)?, ratio, 1.0)
    }

    pub fn ratio(&self) -> f64 {
        self.j_se / self.j_e
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    /// Non-identity factors, sorted by qubit index.
    pub ops: Vec<(usize, Pauli)>,
}

impl PauliTerm {
    pub fn new(coefficient: f64, mut ops: Vec<(usize, Pauli)>) -> Self {
        ops.sort_by_key(|&(q, _)| q);
        Self { coefficient, ops }
    }

    fn two_site(coefficient: f64, p: Pauli, i: usize, j: usize) -> Self {
        Self::new(coefficient, vec![(i, p), (j, p)])
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.ops.iter().map(|&(q, _)| q).max()
    }

    /// Bit-mask form: `P|b> = phase * (-1)^popcount(b & z_mask) |b ^ x_mask>`.
    fn compile(&self) -> CompiledTerm {
        let mut flip = 0usize;
        let mut zmask = 0usize;
        let mut n_y = 0u32;
        for &(q, p) in &self.ops {
            match p {
                Pauli::X => flip |= 1 << q,
                Pauli::Y => {
                    flip |= 1 << q;
                    zmask |= 1 << q;
                    n_y += 1;
                }
                Pauli::Z => zmask |= 1 << q,
            }
        }
        let phase = match n_y % 4 {
            0 => ONE,
            1 => I,
            2 => -ONE,
            _ => -I,
        };
        CompiledTerm {
            flip,
            zmask,
            factor: phase * self.coefficient,
        }
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.coefficient)?;
        for (q, p) in &self.ops {
            write!(f, " {:?}{}", p, q)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
struct CompiledTerm {
    flip: usize,
    zmask: usize,
    factor: C64,
}

impl CompiledTerm {
    #[inline]
    fn sign(&self, b: usize) -> f64 {
        if (b & self.zmask).count_ones() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// System-chain couplings first (chain a then b), then nearest-neighbour
/// bonds ordered by (chain, k). Within each bond: ZZ, XX, YY.
pub fn build_terms(params: &ModelParams) -> Vec<PauliTerm> {
    let layout = params.layout;
    let n = layout.n_per_chain();
    let mut terms = Vec::with_capacity(6 * n);
    for chain in Chain::BOTH {
        let first = layout.index(chain, 1);
        terms.push(PauliTerm::two_site(2.0 * params.j_se, Pauli::Z, QubitLayout::SYSTEM, first));
        terms.push(PauliTerm::two_site(params.j_se, Pauli::X, QubitLayout::SYSTEM, first));
        terms.push(PauliTerm::two_site(params.j_se, Pauli::Y, QubitLayout::SYSTEM, first));
    }
    for chain in Chain::BOTH {
        for k in 1..n {
            let (i, j) = (layout.index(chain, k), layout.index(chain, k + 1));
            terms.push(PauliTerm::two_site(2.0 * params.j_e, Pauli::Z, i, j));
            terms.push(PauliTerm::two_site(-params.j_e, Pauli::X, i, j));
            terms.push(PauliTerm::two_site(-params.j_e, Pauli::Y, i, j));
        }
    }
    terms
}

/// `sum |c|`, an upper bound on the operator norm.
pub fn spectral_bound(terms: &[PauliTerm]) -> f64 {
    terms.iter().map(|t| t.coefficient.abs()).sum()
}

/// Compiled Hamiltonian for repeated application to one register size.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
    compiled: Vec<CompiledTerm>,
}

impl Hamiltonian {
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        if let Some(bad) = terms.iter().find(|t| t.max_qubit().is_some_and(|q| q >= n_qubits)) {
            return Err(Error::Dimension(format!(
                "term {bad} acts outside a {n_qubits}-qubit register"
            )));
        }
        if let Some(bad) = terms.iter().find(|t| !t.coefficient.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite coefficient in {bad}")));
        }
        let compiled = terms.iter().map(PauliTerm::compile).collect();
        Ok(Self {
            n_qubits,
            terms,
            compiled,
        })
    }

    pub fn from_params(params: &ModelParams) -> Self {
        Self::new(params.layout.total_qubits(), build_terms(params))
            .expect("model terms fit their own layout")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn spectral_bound(&self) -> f64 {
        spectral_bound(&self.terms)
    }

    /// `out = H psi`. Each output amplitude sums the terms in fixed order,
    /// so the result does not depend on the thread count.
    pub fn apply_into(&self, psi: &[C64], out: &mut [C64]) {
        assert_eq!(psi.len(), self.dim());
        assert_eq!(out.len(), self.dim());
        let kernel = |offset: usize, chunk: &mut [C64]| {
            for (i, slot) in chunk.iter_mut().enumerate() {
                let c = offset + i;
                let mut acc = ZERO;
                for t in &self.compiled {
                    let b = c ^ t.flip;
                    acc += t.factor * psi[b] * t.sign(b);
                }
                *slot = acc;
            }
        };
        if out.len() <= PAR_CHUNK {
            kernel(0, out);
        } else {
            out.par_chunks_mut(PAR_CHUNK)
                .enumerate()
                .for_each(|(n, chunk)| kernel(n * PAR_CHUNK, chunk));
        }
    }

    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        if psi.n_qubits() != self.n_qubits {
            return Err(Error::Dimension(format!(
                "{}-qubit state for a {}-qubit Hamiltonian",
                psi.n_qubits(),
                self.n_qubits
            )));
        }
        let mut out = PureState::zeros(self.n_qubits);
        self.apply_into(psi.amplitudes(), out.amplitudes_mut());
        Ok(out)
    }

    /// `<psi|H|psi>`; real for normalized `psi` up to round-off.
    pub fn expectation(&self, psi: &[C64]) -> C64 {
        let mut h = vec![ZERO; psi.len()];
        self.apply_into(psi, &mut h);
        crate::qreg::inner(psi, &h)
    }

    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        if self.n_qubits > DENSE_HAMILTONIAN_QUBITS {
            return Err(Error::SizeGuard {
                qubits: self.n_qubits,
                limit: DENSE_HAMILTONIAN_QUBITS,
            });
        }
        let dim = self.dim();
        let mut h = DMatrix::from_element(dim, dim, ZERO);
        for t in &self.compiled {
            for b in 0..dim {
                h[(b ^ t.flip, b)] += t.factor * t.sign(b);
            }
        }
        Ok(h)
    }
}

/// Matrix-free `H psi` for an arbitrary term list.
pub fn apply(terms: &[PauliTerm], psi: &PureState) -> Result<PureState> {
    Hamiltonian::new(psi.n_qubits(), terms.to_vec())?.apply(psi)
}

/// Dense model Hamiltonian; test oracle for small registers.
pub fn build_dense(params: &ModelParams) -> Result<DMatrix<C64>> {
    let n = params.layout.total_qubits();
    if n > DENSE_HAMILTONIAN_QUBITS {
        return Err(Error::SizeGuard {
            qubits: n,
            limit: DENSE_HAMILTONIAN_QUBITS,
        });
    }
    Hamiltonian::from_params(params).to_dense()
}
