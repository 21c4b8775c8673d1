//! Unitary propagation of pure states with a Lanczos (Krylov) exponential.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, ModelParams, PauliTerm};
use crate::qreg::{inner, make_initial_states, norm, PureState, C64, ZERO};

pub mod checkpoint;

/// Krylov dimension at which the residual is first checked.
pub const KRYLOV_START: usize = 20;
pub const KRYLOV_MAX: usize = 120;
pub const MAX_SUBSTEPS: usize = 1000;
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Substeps are sized so that `dt * spectral_bound` stays below this.
pub const MAX_PHASE_PER_SUBSTEP: f64 = 10.0;
/// Default output spacing in units of `1/J_E`.
pub const DEFAULT_MAX_DT: f64 = 0.02;

/// Relative size of the Lanczos residual treated as an exact invariant subspace.
const BREAKDOWN: f64 = 1e-14;

/// Grid size giving spacing at most [`DEFAULT_MAX_DT`].
pub fn default_steps(t_max: f64) -> usize {
    ((t_max / DEFAULT_MAX_DT) - 1e-9).ceil().max(2.0) as usize
}

#[derive(Clone, Debug)]
pub struct Propagator {
    hamiltonian: Hamiltonian,
    bound: f64,
}

impl Propagator {
    pub fn new(hamiltonian: Hamiltonian) -> Self {
        let bound = hamiltonian.spectral_bound();
        Self { hamiltonian, bound }
    }

    pub fn from_params(params: &ModelParams) -> Self {
        Self::new(Hamiltonian::from_params(params))
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    /// `psi <- exp(-i H dt) psi`.
    pub fn step(&self, psi: &mut [C64], dt: f64) -> Result<()> {
        if !dt.is_finite() {
            return Err(Error::InvalidParams(format!("non-finite time step {dt}")));
        }
        if dt == 0.0 || norm(psi) == 0.0 {
            return Ok(());
        }
        let mut substeps = ((dt.abs() * self.bound) / MAX_PHASE_PER_SUBSTEP).ceil().max(1.0) as usize;
        loop {
            if substeps > MAX_SUBSTEPS {
                return Err(Error::Propagation {
                    residual: f64::NAN,
                    grid_index: None,
                });
            }
            let h = dt / substeps as f64;
            let mut trial = psi.to_vec();
            let mut failed = None;
            for _ in 0..substeps {
                match self.krylov_step(&mut trial, h) {
                    Ok(()) => {}
                    Err(residual) => {
                        failed = Some(residual);
                        break;
                    }
                }
            }
            match failed {
                None => {
                    psi.copy_from_slice(&trial);
                    return Ok(());
                }
                Some(residual) if substeps * 2 > MAX_SUBSTEPS => {
                    return Err(Error::Propagation {
                        residual,
                        grid_index: None,
                    })
                }
                Some(_) => substeps *= 2,
            }
        }
    }

    /// One Lanczos exponential step. On failure returns the last residual
    /// estimate.
    fn krylov_step(&self, psi: &mut [C64], h: f64) -> std::result::Result<(), f64> {
        let dim = psi.len();
        let beta0 = norm(psi);
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(KRYLOV_START + 1);
        basis.push(psi.iter().map(|a| a / beta0).collect());
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut w = vec![ZERO; dim];
        let mut residual = f64::INFINITY;

        for j in 0..KRYLOV_MAX.min(dim) {
            self.hamiltonian.apply_into(&basis[j], &mut w);
            let a = inner(&basis[j], &w).re;
            alpha.push(a);
            // Full reorthogonalization, two passes.
            for _ in 0..2 {
                for q in &basis {
                    let c = inner(q, &w);
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = norm(&w);
            let size = j + 1;
            let breakdown = b <= BREAKDOWN * (a.abs() + beta.last().copied().unwrap_or(0.0) + 1.0)
                || size == dim;
            if breakdown || size >= KRYLOV_START.min(dim) {
                let coeffs = tridiagonal_expm_e1(&alpha, &beta, h);
                residual = if breakdown { 0.0 } else { b * coeffs[size - 1].norm() };
                if residual < RESIDUAL_TOL {
                    psi.iter_mut().for_each(|x| *x = ZERO);
                    for (c, q) in coeffs.iter().zip(&basis) {
                        let c = c * beta0;
                        psi.iter_mut().zip(q).for_each(|(x, y)| *x += c * y);
                    }
                    return Ok(());
                }
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        Err(residual)
    }
}

/// `exp(-i h T) e_1` for the symmetric tridiagonal `T` with diagonal
/// `alpha` and off-diagonal `beta`.
fn tridiagonal_expm_e1(alpha: &[f64], beta: &[f64], h: f64) -> Vec<C64> {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    let v = &eig.eigenvectors;
    (0..m)
        .map(|i| {
            (0..m)
                .map(|k| {
                    let phase = C64::from_polar(1.0, -h * eig.eigenvalues[k]);
                    phase * (v[(i, k)] * v[(0, k)])
                })
                .sum()
        })
        .collect()
}

/// `exp(-i H dt) psi` for an arbitrary term list.
pub fn propagate(psi: &PureState, terms: &[PauliTerm], dt: f64) -> Result<PureState> {
    let h = Hamiltonian::new(psi.n_qubits(), terms.to_vec())?;
    let mut out = psi.clone();
    Propagator::new(h).step(out.amplitudes_mut(), dt)?;
    Ok(out)
}

/// Conditional trajectories `psi^(+)(t)`, `psi^(-)(t)` on a uniform grid.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states_plus: Vec<PureState>,
    pub states_minus: Vec<PureState>,
    pub params: ModelParams,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    /// `(<H>_+, <H>_-)` at each grid point.
    pub fn energies(&self) -> Vec<(f64, f64)> {
        let h = Hamiltonian::from_params(&self.params);
        self.states_plus
            .iter()
            .zip(&self.states_minus)
            .map(|(p, m)| (h.expectation(p.amplitudes()).re, h.expectation(m.amplitudes()).re))
            .collect()
    }
}

pub fn run_trajectory(params: &ModelParams, t_max: f64, n_steps: usize) -> Result<Trajectory> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::InvalidParams(format!("t_max must be > 0, got {t_max}")));
    }
    if n_steps < 2 {
        return Err(Error::InvalidParams(format!("need at least 2 steps, got {n_steps}")));
    }
    let propagator = Propagator::from_params(params);
    let dt = t_max / n_steps as f64;
    let times: Vec<f64> = (0..=n_steps).map(|i| i as f64 * dt).collect();
    let (plus0, minus0) = make_initial_states(params.layout);

    let evolve_one = |start: PureState| -> Result<Vec<PureState>> {
        let mut states = Vec::with_capacity(n_steps + 1);
        let mut current = start;
        states.push(current.clone());
        for i in 1..=n_steps {
            propagator
                .step(current.amplitudes_mut(), dt)
                .map_err(|e| e.at_grid_index(i))?;
            states.push(current.clone());
        }
        Ok(states)
    };
    let (plus, minus) = rayon::join(|| evolve_one(plus0), || evolve_one(minus0));
    Ok(Trajectory {
        times,
        states_plus: plus?,
        states_minus: minus?,
        params: *params,
    })
}
