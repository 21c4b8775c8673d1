use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{series_from, Series, SeriesPoint};
use crate::error::{Error, Result};
use crate::evolve::Trajectory;
use crate::linalg::{column, hermitian_eigenvalues, hermitian_eigh, orthonormal_span, project};
use crate::qreg::{Chain, DensityOp, PureState, Repr, C64, DENSE_QUBIT_LIMIT, ZERO};
use crate::reduce::{env_factor, partial_trace, RANK_CUTOFF};

fn same_subset(a: &DensityOp, b: &DensityOp) -> Result<()> {
    if a.qubits() != b.qubits() {
        return Err(Error::Dimension(format!(
            "operators on different qubits: {:?} vs {:?}",
            a.qubits(),
            b.qubits()
        )));
    }
    Ok(())
}

fn half_abs_sum(eigenvalues: &[f64]) -> f64 {
    0.5 * eigenvalues.iter().map(|l| l.abs()).sum::<f64>()
}

/// `1/2 sum |eig(rho1 - rho2)|`. Pairs of factored operators too large to
/// expand go through [`trace_distance_lowrank`].
pub fn trace_distance(rho1: &DensityOp, rho2: &DensityOp) -> Result<f64> {
    same_subset(rho1, rho2)?;
    if rho1.is_factored() && rho2.is_factored() && rho1.qubits().len() > DENSE_QUBIT_LIMIT {
        return trace_distance_lowrank(rho1, rho2);
    }
    let diff = rho1.to_dense()? - rho2.to_dense()?;
    Ok(half_abs_sum(&hermitian_eigenvalues(&diff)))
}

/// Trace distance of two factored operators, computed on the joint column
/// span of their factors.
pub fn trace_distance_lowrank(rho1: &DensityOp, rho2: &DensityOp) -> Result<f64> {
    same_subset(rho1, rho2)?;
    let (Repr::Factored(b1), Repr::Factored(b2)) = (rho1.repr(), rho2.repr()) else {
        return Err(Error::Dimension("low-rank trace distance needs factored operators".into()));
    };
    Ok(lowrank_distance(b1, b2))
}

fn lowrank_distance(b1: &DMatrix<C64>, b2: &DMatrix<C64>) -> f64 {
    let cols: Vec<Vec<C64>> = (0..b1.ncols())
        .map(|j| column(b1, j))
        .chain((0..b2.ncols()).map(|j| column(b2, j)))
        .collect();
    let refs: Vec<&[C64]> = cols.iter().map(Vec::as_slice).collect();
    let basis = orthonormal_span(&refs, RANK_CUTOFF);
    if basis.is_empty() {
        return 0.0;
    }
    let p1 = project(&basis, b1);
    let p2 = project(&basis, b2);
    let m = &p1 * p1.adjoint() - &p2 * p2.adjoint();
    half_abs_sum(&hermitian_eigenvalues(&m))
}

fn check_nonempty(traj: &Trajectory) -> Result<()> {
    if traj.is_empty() {
        return Err(Error::InvalidParams("empty trajectory".into()));
    }
    Ok(())
}

/// Evaluate `f` on each grid point in parallel, keeping grid order.
fn per_point<F>(traj: &Trajectory, f: F) -> Result<Series>
where
    F: Fn(&PureState, &PureState) -> Result<f64> + Sync,
{
    check_nonempty(traj)?;
    let values = (0..traj.len())
        .into_par_iter()
        .map(|i| f(&traj.states_plus[i], &traj.states_minus[i]))
        .collect::<Result<Vec<f64>>>()?;
    Ok(series_from(&traj.times, values))
}

/// `D_S(t)` between the two conditional system states.
pub fn system_distance_series(traj: &Trajectory) -> Result<Series> {
    per_point(traj, |p, m| trace_distance(&partial_trace(p, &[0])?, &partial_trace(m, &[0])?))
}

/// `D_E(t)` between the two conditional environment states (low-rank path).
pub fn env_distance_series(traj: &Trajectory) -> Result<Series> {
    per_point(traj, |p, m| trace_distance_lowrank(&env_factor(p), &env_factor(m)))
}

/// Distance between the conditional states of a single chain element.
pub fn env_qubit_distance_series(traj: &Trajectory, chain: Chain, k: usize) -> Result<Series> {
    let n = traj.params.layout.n_per_chain();
    if !(1..=n).contains(&k) {
        return Err(Error::Dimension(format!("chain position {k} outside 1..={n}")));
    }
    let q = traj.params.layout.index(chain, k);
    per_point(traj, |p, m| trace_distance(&partial_trace(p, &[q])?, &partial_trace(m, &[q])?))
}

/// Finite-difference time derivative: central in the interior, one-sided at
/// the ends.
pub fn sigma(series: &[SeriesPoint]) -> Result<Series> {
    let n = series.len();
    if n < 3 {
        return Err(Error::InvalidParams(format!(
            "derivative needs at least 3 grid points, got {n}"
        )));
    }
    let v = |i: usize| series[i].value;
    let t = |i: usize| series[i].t;
    let out = (0..n)
        .map(|i| {
            let d = match i {
                0 => (v(1) - v(0)) / (t(1) - t(0)),
                i if i == n - 1 => (v(i) - v(i - 1)) / (t(i) - t(i - 1)),
                i => (v(i + 1) - v(i - 1)) / (t(i + 1) - t(i - 1)),
            };
            SeriesPoint { t: t(i), value: d }
        })
        .collect();
    Ok(out)
}

/// Accumulated growth `int max(dD/dt, 0) dt` of a distance series, taking
/// the derivative of its piecewise-linear interpolant. Equals the sum of
/// positive increments.
pub fn blp_accumulated(series: &[SeriesPoint]) -> f64 {
    series
        .windows(2)
        .map(|w| (w[1].value - w[0].value).max(0.0))
        .sum()
}

/// Terms of the system/environment/correlation trace-distance bound at a
/// grid time `tau`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaineTerms {
    pub t: f64,
    /// `max_{t > tau} D_S(t) - D_S(tau)`, clipped at 0.
    pub lhs_sup: f64,
    pub d_env: f64,
    pub corr_plus: f64,
    pub corr_minus: f64,
    /// `d_env + corr_plus + corr_minus - lhs_sup`; never below -1e-9.
    pub slack: f64,
}

/// Distance between a global pure state and the product of its marginals on
/// qubit 0 and the rest.
fn correlation_distance(psi: &PureState) -> Result<f64> {
    let rho_s = partial_trace(psi, &[0])?.to_dense()?;
    let (vals, vecs) = hermitian_eigh(&rho_s);
    let env = env_factor(psi);
    let Repr::Factored(b_env) = env.repr() else {
        unreachable!("env_factor is factored")
    };
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(4);
    for a in 0..2 {
        let w = vals[a].max(0.0).sqrt();
        if w <= RANK_CUTOFF {
            continue;
        }
        for c in 0..b_env.ncols() {
            let mut col = vec![ZERO; psi.dim()];
            for (e, b) in b_env.column(c).iter().enumerate() {
                for s in 0..2 {
                    col[s + 2 * e] = vecs[(s, a)] * w * b;
                }
            }
            columns.push(col);
        }
    }
    let product = DMatrix::from_fn(psi.dim(), columns.len(), |i, j| columns[j][i]);
    let global = DMatrix::from_column_slice(psi.dim(), 1, psi.amplitudes());
    Ok(lowrank_distance(&global, &product))
}

fn lhs_sup_series(d_s: &[f64]) -> Vec<f64> {
    let n = d_s.len();
    let mut out = vec![0.0; n];
    let mut best_after = f64::NEG_INFINITY;
    for i in (0..n).rev() {
        out[i] = if best_after.is_finite() {
            (best_after - d_s[i]).max(0.0)
        } else {
            0.0
        };
        best_after = best_after.max(d_s[i]);
    }
    out
}

fn assemble(t: f64, lhs_sup: f64, d_env: f64, corr_plus: f64, corr_minus: f64) -> LaineTerms {
    LaineTerms {
        t,
        lhs_sup,
        d_env,
        corr_plus,
        corr_minus,
        slack: d_env + corr_plus + corr_minus - lhs_sup,
    }
}

pub fn laine_terms(traj: &Trajectory, tau_index: usize) -> Result<LaineTerms> {
    check_nonempty(traj)?;
    if tau_index >= traj.len() {
        return Err(Error::Dimension(format!(
            "grid index {tau_index} outside trajectory of {} points",
            traj.len()
        )));
    }
    let d_s = super::values(&system_distance_series(traj)?);
    let lhs = lhs_sup_series(&d_s)[tau_index];
    let (p, m) = (&traj.states_plus[tau_index], &traj.states_minus[tau_index]);
    Ok(assemble(
        traj.times[tau_index],
        lhs,
        trace_distance_lowrank(&env_factor(p), &env_factor(m))?,
        correlation_distance(p)?,
        correlation_distance(m)?,
    ))
}

/// [`laine_terms`] at every grid point.
pub fn laine_series(traj: &Trajectory) -> Result<Vec<LaineTerms>> {
    let d_s = super::values(&system_distance_series(traj)?);
    let lhs = lhs_sup_series(&d_s);
    (0..traj.len())
        .into_par_iter()
        .map(|i| {
            let (p, m) = (&traj.states_plus[i], &traj.states_minus[i]);
            Ok(assemble(
                traj.times[i],
                lhs[i],
                trace_distance_lowrank(&env_factor(p), &env_factor(m))?,
                correlation_distance(p)?,
                correlation_distance(m)?,
            ))
        })
        .collect()
}
