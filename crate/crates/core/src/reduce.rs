//! Partial traces, low-rank environment factors, and subset entropies.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{entropy_bits, hermitian_eigenvalues, hermitian_eigh};
use crate::qreg::{DensityOp, PureState, DENSE_QUBIT_LIMIT, C64, ZERO};

/// Factor columns with norm below this are dropped.
pub const RANK_CUTOFF: f64 = 1e-12;

/// Global basis offsets for every local index of `qubits`; local bit `j`
/// maps to global bit `qubits[j]`.
pub(crate) fn offsets(qubits: &[usize]) -> Vec<usize> {
    let mut offs = Vec::with_capacity(1 << qubits.len());
    offs.push(0);
    for &q in qubits {
        let bit = 1usize << q;
        for i in 0..offs.len() {
            offs.push(offs[i] | bit);
        }
    }
    offs
}

fn validate_subset(n_qubits: usize, subset: &[usize]) -> Result<()> {
    let mut seen = vec![false; n_qubits];
    for &q in subset {
        if q >= n_qubits {
            return Err(Error::Dimension(format!(
                "qubit {q} outside a {n_qubits}-qubit register"
            )));
        }
        if std::mem::replace(&mut seen[q], true) {
            return Err(Error::Dimension(format!("qubit {q} listed twice")));
        }
    }
    Ok(())
}

pub(crate) fn complement(n_qubits: usize, subset: &[usize]) -> Vec<usize> {
    (0..n_qubits).filter(|q| !subset.contains(q)).collect()
}

/// Amplitudes reshaped as a `2^|keep| x 2^|rest|` matrix.
pub(crate) fn reshape(amps: &[C64], keep: &[usize], rest: &[usize]) -> DMatrix<C64> {
    let ko = offsets(keep);
    let ro = offsets(rest);
    DMatrix::from_fn(ko.len(), ro.len(), |i, c| amps[ko[i] | ro[c]])
}

/// Unnormalized reduced operator `M M^dagger` of an amplitude vector.
pub(crate) fn reduced_matrix(amps: &[C64], n_qubits: usize, keep: &[usize]) -> DMatrix<C64> {
    let rest = complement(n_qubits, keep);
    let m = reshape(amps, keep, &rest);
    &m * m.adjoint()
}

pub fn partial_trace(psi: &PureState, keep: &[usize]) -> Result<DensityOp> {
    if keep.is_empty() {
        return Err(Error::Dimension("partial trace onto an empty subset".into()));
    }
    validate_subset(psi.n_qubits(), keep)?;
    if keep.len() > DENSE_QUBIT_LIMIT {
        return Err(Error::SizeGuard {
            qubits: keep.len(),
            limit: DENSE_QUBIT_LIMIT,
        });
    }
    DensityOp::dense(keep.to_vec(), reduced_matrix(psi.amplitudes(), psi.n_qubits(), keep))
}

/// Factored state of everything except qubit 0, `rho_E = B B^dagger`, with
/// rank at most 2. Columns come from the eigenbasis of the system's Gram
/// matrix, so a product state yields rank 1.
pub fn env_factor(psi: &PureState) -> DensityOp {
    let n = psi.n_qubits();
    let env: Vec<usize> = (1..n).collect();
    let raw = reshape(psi.amplitudes(), &env, &[0]);
    DensityOp::factored(env, compress_factor(&raw)).expect("factor rows match subset")
}

/// Rotate a factor into orthogonal columns and drop negligible ones.
pub(crate) fn compress_factor(b: &DMatrix<C64>) -> DMatrix<C64> {
    let gram = b.adjoint() * b;
    let (vals, vecs) = hermitian_eigh(&gram);
    let rotated = b * vecs;
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&j| vals[j].max(0.0).sqrt() > RANK_CUTOFF)
        .collect();
    let mut out = DMatrix::from_element(b.nrows(), kept.len(), ZERO);
    for (c, &j) in kept.iter().enumerate() {
        out.set_column(c, &rotated.column(j));
    }
    out
}

/// Entropy (bits) of the reduced state on `subset` of a pure state given as
/// raw amplitudes. Works on whichever of subset/complement is smaller.
pub(crate) fn pure_subset_entropy(amps: &[C64], n_qubits: usize, subset: &[usize]) -> f64 {
    let rest = complement(n_qubits, subset);
    let side = if subset.len() <= rest.len() { subset } else { &rest[..] };
    if side.is_empty() {
        return 0.0;
    }
    let rho = reduced_matrix(amps, n_qubits, side);
    let tr: f64 = rho.diagonal().iter().map(|z| z.re).sum();
    if tr <= 0.0 {
        return 0.0;
    }
    let eig: Vec<f64> = hermitian_eigenvalues(&rho).into_iter().map(|l| l / tr).collect();
    entropy_bits(&eig)
}

pub fn entropy_of_subset(psi: &PureState, subset: &[usize]) -> Result<f64> {
    validate_subset(psi.n_qubits(), subset)?;
    Ok(pure_subset_entropy(psi.amplitudes(), psi.n_qubits(), subset))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qreg::ONE;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n_qubits: usize, seed: u64) -> PureState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1 << n_qubits)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut s = PureState::from_amplitudes(n_qubits, amps).unwrap();
        s.normalize();
        s
    }

    /// Brute-force oracle: sum over all index pairs that agree on the
    /// discarded qubits.
    fn naive_partial_trace(psi: &PureState, keep: &[usize]) -> DMatrix<C64> {
        let k = keep.len();
        let mut rho = DMatrix::from_element(1 << k, 1 << k, ZERO);
        let local = |g: usize| keep.iter().enumerate().fold(0, |acc, (j, &q)| acc | (((g >> q) & 1) << j));
        let keep_mask: usize = keep.iter().map(|q| 1 << q).sum();
        for a in 0..psi.dim() {
            for b in 0..psi.dim() {
                if a & !keep_mask == b & !keep_mask {
                    rho[(local(a), local(b))] += psi.amplitudes()[a] * psi.amplitudes()[b].conj();
                }
            }
        }
        rho
    }

    fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn bell() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::from_amplitudes(2, vec![C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)]).unwrap()
    }

    #[test]
    fn matches_naive_oracle() {
        let psi = random_state(3, 5);
        let rho = partial_trace(&psi, &[0, 2]).unwrap();
        assert!(max_diff(&rho.to_dense().unwrap(), &naive_partial_trace(&psi, &[0, 2])) < 1e-12);
        // Non-sorted keep order follows the listed order.
        let rho = partial_trace(&psi, &[2, 0]).unwrap();
        assert!(max_diff(&rho.to_dense().unwrap(), &naive_partial_trace(&psi, &[2, 0])) < 1e-12);
        rho.check().unwrap();
    }

    #[test]
    fn product_state_factorizes() {
        let a = random_state(2, 1);
        let b = random_state(1, 2);
        let psi = PureState::tensor(&a, &b);
        let rho = partial_trace(&psi, &[0, 1]).unwrap().to_dense().unwrap();
        let v = nalgebra::DVector::from_column_slice(a.amplitudes());
        assert!(max_diff(&rho, &(&v * v.adjoint())) < 1e-12);
        // a itself is entangled across qubits 0 and 1; only the a/b cut is product.
        for subset in [&[0, 1][..], &[2]] {
            let s = entropy_of_subset(&psi, subset).unwrap();
            assert!(s.abs() < 1e-12, "{subset:?}: {s:e}");
        }
    }

    #[test]
    fn bell_pair_is_maximally_mixed() {
        let rho = partial_trace(&bell(), &[0]).unwrap().to_dense().unwrap();
        let half = DMatrix::identity(2, 2) * C64::new(0.5, 0.0);
        assert!(max_diff(&rho, &half) < 1e-15);
        assert!((entropy_of_subset(&bell(), &[0]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(entropy_of_subset(&bell(), &[0, 1]).unwrap(), 0.0);
    }

    #[test]
    fn subset_errors() {
        let psi = random_state(3, 0);
        assert!(partial_trace(&psi, &[]).is_err());
        assert!(partial_trace(&psi, &[3]).is_err());
        assert!(partial_trace(&psi, &[1, 1]).is_err());
        assert!(entropy_of_subset(&psi, &[4]).is_err());
    }

    #[test]
    fn env_factor_matches_partial_trace() {
        for n in 3..=7 {
            let psi = random_state(n, n as u64);
            let f = env_factor(&psi);
            assert!(f.rank().unwrap() <= 2);
            let dense = partial_trace(&psi, &(1..n).collect::<Vec<_>>()).unwrap();
            assert!(max_diff(&f.to_dense().unwrap(), &dense.to_dense().unwrap()) < 1e-12);
        }
    }

    #[test]
    fn env_factor_of_product_has_rank_one() {
        let (plus, _) = crate::qreg::make_initial_states(crate::qreg::QubitLayout::new(3).unwrap());
        let f = env_factor(&plus);
        assert_eq!(f.rank(), Some(1));
        assert!((f.trace() - 1.0).abs() < 1e-14);
        let vac = f.to_dense().unwrap();
        assert!((vac[(0, 0)] - ONE).norm() < 1e-14);
    }

    #[test]
    fn tracing_composes() {
        let psi = random_state(5, 9);
        let direct = partial_trace(&psi, &[1, 3]).unwrap().to_dense().unwrap();
        // Trace {0,1,3,4} down to {1,3}: local positions 1 and 2.
        let big = partial_trace(&psi, &[0, 1, 3, 4]).unwrap().to_dense().unwrap();
        let mut small = DMatrix::from_element(4, 4, ZERO);
        for i in 0..16usize {
            for j in 0..16usize {
                let (ri, rj) = (i & 0b1001, j & 0b1001);
                if ri == rj {
                    let li = (i >> 1) & 0b11;
                    let lj = (j >> 1) & 0b11;
                    small[(li, lj)] += big[(i, j)];
                }
            }
        }
        assert!(max_diff(&direct, &small) < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn schmidt_duality(seed in 0u64..10_000, mask in 1u32..31) {
            let psi = random_state(5, seed);
            let subset: Vec<usize> = (0..5).filter(|q| mask >> q & 1 == 1).collect();
            let rest = complement(5, &subset);
            let s1 = entropy_of_subset(&psi, &subset).unwrap();
            let s2 = entropy_of_subset(&psi, &rest).unwrap();
            prop_assert!((s1 - s2).abs() < 1e-10);
            prop_assert!(s1 >= -1e-12);
            // Direct evaluation on the subset itself agrees with the smaller side.
            let rho = partial_trace(&psi, &subset).unwrap();
            rho.check().unwrap();
            let direct = entropy_bits(&hermitian_eigenvalues(&rho.to_dense().unwrap()));
            prop_assert!((direct - s1).abs() < 1e-10);
        }
    }
}
