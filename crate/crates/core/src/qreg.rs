//! Register layout, state containers, and single-qubit helpers.
//!
//! Global qubit indices: the system is qubit 0, chain `a` occupies
//! `1..=N` and chain `b` occupies `N+1..=2N`, both ordered outward from the
//! system. Basis index bit `k` holds the state of qubit `k`, with bit value
//! 0 meaning `|0>` (the +1 eigenstate of sigma_z).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Tolerance used when checking the density-operator invariants.
pub const DENSITY_TOL: f64 = 1e-10;

/// Dense operators are refused beyond this many qubits.
pub const DENSE_QUBIT_LIMIT: usize = 13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Chain {
    A,
    B,
}

impl Chain {
    pub const BOTH: [Chain; 2] = [Chain::A, Chain::B];

    pub fn label(self) -> &'static str {
        match self {
            Chain::A => "a",
            Chain::B => "b",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QubitLayout {
    n_per_chain: usize,
}

impl QubitLayout {
    pub const SYSTEM: usize = 0;

    pub fn new(n_per_chain: usize) -> Result<Self> {
        if n_per_chain == 0 {
            return Err(Error::InvalidParams("chain length N must be >= 1".into()));
        }
        // 2N+1 qubits must index a usize-addressed vector comfortably.
        if 2 * n_per_chain + 1 > 30 {
            return Err(Error::InvalidParams(format!(
                "chain length N = {n_per_chain} gives a register too large to store"
            )));
        }
        Ok(Self { n_per_chain })
    }

    pub fn n_per_chain(&self) -> usize {
        self.n_per_chain
    }

    pub fn total_qubits(&self) -> usize {
        2 * self.n_per_chain + 1
    }

    pub fn dimension(&self) -> usize {
        1 << self.total_qubits()
    }

    /// Global index of element `position` (1-based, outward) of `chain`.
    pub fn index(&self, chain: Chain, position: usize) -> usize {
        assert!(
            (1..=self.n_per_chain).contains(&position),
            "chain position {position} outside 1..={}",
            self.n_per_chain
        );
        match chain {
            Chain::A => position,
            Chain::B => self.n_per_chain + position,
        }
    }

    /// Inverse of [`QubitLayout::index`]; `None` for the system qubit.
    pub fn locate(&self, global: usize) -> Option<(Chain, usize)> {
        let n = self.n_per_chain;
        match global {
            0 => None,
            g if g <= n => Some((Chain::A, g)),
            g if g <= 2 * n => Some((Chain::B, g - n)),
            _ => panic!("qubit index {global} outside register of {} qubits", 2 * n + 1),
        }
    }

    /// All environment qubits, in global order.
    pub fn environment(&self) -> Vec<usize> {
        (1..self.total_qubits()).collect()
    }

    /// Fragment `F_m`: positions `1..=m` of both chains.
    pub fn fragment(&self, m: usize) -> Vec<usize> {
        let mut qubits: Vec<usize> = (1..=m)
            .flat_map(|k| Chain::BOTH.map(|c| self.index(c, k)))
            .collect();
        qubits.sort_unstable();
        qubits
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::Dimension(format!(
                "{} amplitudes for {} qubits",
                amplitudes.len(),
                n_qubits
            )));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn zeros(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            amplitudes: vec![ZERO; 1 << n_qubits],
        }
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut s = Self::zeros(n_qubits);
        s.amplitudes[index] = ONE;
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amplitudes.iter_mut().for_each(|a| *a /= n);
        }
    }

    /// Product state with `first` on the low-order qubits.
    pub fn tensor(first: &PureState, second: &PureState) -> PureState {
        let lo = first.dim();
        let mut amplitudes = vec![ZERO; lo * second.dim()];
        for (j, b) in second.amplitudes.iter().enumerate() {
            for (i, a) in first.amplitudes.iter().enumerate() {
                amplitudes[i + lo * j] = a * b;
            }
        }
        PureState {
            n_qubits: first.n_qubits + second.n_qubits,
            amplitudes,
        }
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `psi^(+)(0) = |+>|0...0>` and `psi^(-)(0) = |->|0...0>`.
pub fn make_initial_states(layout: QubitLayout) -> (PureState, PureState) {
    let n = layout.total_qubits();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut plus = PureState::zeros(n);
    let mut minus = PureState::zeros(n);
    plus.amplitudes[0] = C64::new(h, 0.0);
    plus.amplitudes[1] = C64::new(h, 0.0);
    minus.amplitudes[0] = C64::new(h, 0.0);
    minus.amplitudes[1] = C64::new(-h, 0.0);
    (plus, minus)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Repr {
    Dense(DMatrix<C64>),
    /// `rho = B B^dagger`, one column per unit of rank.
    Factored(DMatrix<C64>),
}

/// Density operator on an ordered subset of qubits. Local basis bit `j`
/// corresponds to `qubits[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOp {
    qubits: Vec<usize>,
    repr: Repr,
}

impl DensityOp {
    pub fn dense(qubits: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        let dim = 1usize << qubits.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Dimension(format!(
                "{}x{} matrix for {} qubits",
                matrix.nrows(),
                matrix.ncols(),
                qubits.len()
            )));
        }
        Ok(Self {
            qubits,
            repr: Repr::Dense(matrix),
        })
    }

    pub fn factored(qubits: Vec<usize>, factor: DMatrix<C64>) -> Result<Self> {
        let dim = 1usize << qubits.len();
        if factor.nrows() != dim {
            return Err(Error::Dimension(format!(
                "factor with {} rows for {} qubits",
                factor.nrows(),
                qubits.len()
            )));
        }
        Ok(Self {
            qubits,
            repr: Repr::Factored(factor),
        })
    }

    pub fn pure(qubits: Vec<usize>, state: &PureState) -> Result<Self> {
        Self::factored(
            qubits,
            DMatrix::from_column_slice(state.dim(), 1, state.amplitudes()),
        )
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits.len()
    }

    pub fn is_factored(&self) -> bool {
        matches!(self.repr, Repr::Factored(_))
    }

    /// Number of factor columns; `None` for dense operators.
    pub fn rank(&self) -> Option<usize> {
        match &self.repr {
            Repr::Factored(b) => Some(b.ncols()),
            Repr::Dense(_) => None,
        }
    }

    pub fn trace(&self) -> f64 {
        match &self.repr {
            Repr::Dense(m) => m.diagonal().iter().map(|z| z.re).sum(),
            Repr::Factored(b) => b.iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    /// Dense matrix; expands a factored form as `B B^dagger`.
    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        match &self.repr {
            Repr::Dense(m) => Ok(m.clone()),
            Repr::Factored(b) => {
                if self.qubits.len() > DENSE_QUBIT_LIMIT {
                    return Err(Error::SizeGuard {
                        qubits: self.qubits.len(),
                        limit: DENSE_QUBIT_LIMIT,
                    });
                }
                Ok(b * b.adjoint())
            }
        }
    }

    /// Check Hermiticity, unit trace and positivity within `DENSITY_TOL`.
    pub fn check(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidParams(format!("trace {tr} != 1")));
        }
        if let Repr::Dense(m) = &self.repr {
            let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if herm > DENSITY_TOL {
                return Err(Error::InvalidParams(format!(
                    "not Hermitian (max deviation {herm:e})"
                )));
            }
            let min = crate::linalg::hermitian_eigenvalues(m)
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            if min < -DENSITY_TOL {
                return Err(Error::InvalidParams(format!(
                    "negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// `(I + r . sigma) / 2`.
    pub fn to_density(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new((1.0 + self.z) / 2.0, 0.0),
                C64::new(self.x / 2.0, -self.y / 2.0),
                C64::new(self.x / 2.0, self.y / 2.0),
                C64::new((1.0 - self.z) / 2.0, 0.0),
            ],
        )
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Bloch vector `(Tr rho X, Tr rho Y, Tr rho Z)` of a single-qubit operator.
pub fn bloch_of(rho: &DensityOp) -> Result<BlochVector> {
    if rho.qubits.len() != 1 {
        return Err(Error::Dimension(format!(
            "Bloch vector needs one qubit, got {}",
            rho.qubits.len()
        )));
    }
    let m = rho.to_dense()?;
    let off = m[(1, 0)];
    Ok(BlochVector {
        x: 2.0 * off.re,
        y: 2.0 * off.im,
        z: (m[(0, 0)] - m[(1, 1)]).re,
    })
}
