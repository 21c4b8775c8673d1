use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{entropy_bits, hermitian_eigenvalues};
use crate::qreg::{PureState, QubitLayout, C64};
use crate::reduce::{complement, pure_subset_entropy, reshape};

/// Outcomes with probability below this contribute nothing.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-14;

/// Projective measurement on the system qubit:
/// `|m0> = cos(theta)|0> + e^{i phi} sin(theta)|1>` and its orthogonal
/// complement `|m1> = e^{-i phi} sin(theta)|0> - cos(theta)|1>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementSetting {
    theta: f64,
    phi: f64,
}

impl MeasurementSetting {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && (0.0..=PI).contains(&theta)) {
            return Err(Error::InvalidParams(format!("theta = {theta} outside [0, pi]")));
        }
        if !(phi.is_finite() && (0.0..2.0 * PI).contains(&phi)) {
            return Err(Error::InvalidParams(format!("phi = {phi} outside [0, 2pi)")));
        }
        Ok(Self { theta, phi })
    }

    /// Clamp `theta` into range and wrap `phi`.
    fn normalized(theta: f64, phi: f64) -> Self {
        let phi = phi.rem_euclid(2.0 * PI);
        Self {
            theta: theta.clamp(0.0, PI),
            phi: if phi >= 2.0 * PI { 0.0 } else { phi },
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Amplitudes `[<0|m_k>, <1|m_k>]` of both outcome vectors.
    pub fn vectors(&self) -> [[C64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        let e = C64::from_polar(1.0, self.phi);
        [
            [C64::new(c, 0.0), e * s],
            [e.conj() * s, C64::new(-c, 0.0)],
        ]
    }
}

fn fragment_checked(layout: &QubitLayout, m: usize) -> Result<Vec<usize>> {
    if m > layout.n_per_chain() {
        return Err(Error::Dimension(format!(
            "fragment size {m} exceeds chain length {}",
            layout.n_per_chain()
        )));
    }
    Ok(layout.fragment(m))
}

fn check_state(psi: &PureState, layout: &QubitLayout) -> Result<()> {
    if psi.n_qubits() != layout.total_qubits() {
        return Err(Error::Dimension(format!(
            "{}-qubit state for a {}-qubit layout",
            psi.n_qubits(),
            layout.total_qubits()
        )));
    }
    Ok(())
}

/// `I(S : X) = S(S) + S(X) - S(SX)` for a subset `X` not containing qubit 0.
pub fn mutual_information_with(psi: &PureState, subset: &[usize]) -> Result<f64> {
    if subset.contains(&0) {
        return Err(Error::Dimension("subset must exclude the system qubit".into()));
    }
    let n = psi.n_qubits();
    if subset.iter().any(|&q| q >= n) {
        return Err(Error::Dimension(format!("subset {subset:?} outside register")));
    }
    if subset.is_empty() {
        return Ok(0.0);
    }
    let amps = psi.amplitudes();
    let mut joint = vec![0];
    joint.extend_from_slice(subset);
    Ok(pure_subset_entropy(amps, n, &[0]) + pure_subset_entropy(amps, n, subset)
        - pure_subset_entropy(amps, n, &joint))
}

/// Mutual information between the system and fragment `F_m`.
pub fn mutual_information(psi: &PureState, layout: &QubitLayout, m: usize) -> Result<f64> {
    check_state(psi, layout)?;
    let fragment = fragment_checked(layout, m)?;
    mutual_information_with(psi, &fragment)
}

/// Environment amplitudes conditioned on system basis value `s`.
fn env_component(psi: &PureState, s: usize) -> Vec<C64> {
    psi.amplitudes().iter().skip(s).step_by(2).copied().collect()
}

/// `S(F_m) - sum_k p_k S(F_m | k)` at a fixed measurement setting.
pub fn holevo(
    psi: &PureState,
    layout: &QubitLayout,
    m: usize,
    setting: MeasurementSetting,
) -> Result<f64> {
    check_state(psi, layout)?;
    let fragment = fragment_checked(layout, m)?;
    if m == 0 {
        return Ok(0.0);
    }
    let n = psi.n_qubits();
    let s_fragment = pure_subset_entropy(psi.amplitudes(), n, &fragment);
    let local: Vec<usize> = fragment.iter().map(|q| q - 1).collect();
    let comps = [env_component(psi, 0), env_component(psi, 1)];
    let mut conditional = 0.0;
    for mk in setting.vectors() {
        let (c0, c1) = (mk[0].conj(), mk[1].conj());
        let phi: Vec<C64> = comps[0].iter().zip(&comps[1]).map(|(a, b)| c0 * a + c1 * b).collect();
        let p: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
        if p < MIN_BRANCH_PROBABILITY {
            continue;
        }
        conditional += p * pure_subset_entropy(&phi, n - 1, &local);
    }
    Ok(s_fragment - conditional)
}

/// Precomputed cross blocks `R_{ss'} = Tr_rest |psi_s><psi_s'|` on the
/// smaller of the fragment and its environment complement, so that each
/// measurement setting costs two small eigensolves.
#[derive(Clone, Debug)]
pub struct HolevoSurface {
    s_fragment: f64,
    blocks: [[DMatrix<C64>; 2]; 2],
}

impl HolevoSurface {
    pub fn new(psi: &PureState, layout: &QubitLayout, m: usize) -> Result<Self> {
        check_state(psi, layout)?;
        let fragment = fragment_checked(layout, m)?;
        let n_env = psi.n_qubits() - 1;
        let local: Vec<usize> = fragment.iter().map(|q| q - 1).collect();
        let rest = complement(n_env, &local);
        let (side, other) = if local.len() <= rest.len() { (&local, &rest) } else { (&rest, &local) };
        let mats = [0, 1].map(|s| reshape(&env_component(psi, s), side, other));
        let block = |a: usize, b: usize| &mats[a] * mats[b].adjoint();
        Ok(Self {
            s_fragment: pure_subset_entropy(psi.amplitudes(), psi.n_qubits(), &fragment),
            blocks: [[block(0, 0), block(0, 1)], [block(1, 0), block(1, 1)]],
        })
    }

    pub fn fragment_entropy(&self) -> f64 {
        self.s_fragment
    }

    pub fn eval(&self, setting: MeasurementSetting) -> f64 {
        let mut conditional = 0.0;
        for mk in setting.vectors() {
            let c = [mk[0].conj(), mk[1].conj()];
            let mut rho = &self.blocks[0][0] * (c[0] * c[0].conj());
            for (a, b) in [(0, 1), (1, 0), (1, 1)] {
                rho += &self.blocks[a][b] * (c[a] * c[b].conj());
            }
            let p: f64 = rho.diagonal().iter().map(|z| z.re).sum();
            if p < MIN_BRANCH_PROBABILITY {
                continue;
            }
            let eig: Vec<f64> = hermitian_eigenvalues(&rho).into_iter().map(|l| l / p).collect();
            conditional += p * entropy_bits(&eig);
        }
        self.s_fragment - conditional
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscordOptions {
    /// Points per angle in the coarse grid.
    pub grid: usize,
    /// Refinement stops once both angle steps fall below this (radians).
    pub step_tol: f64,
}

impl Default for DiscordOptions {
    fn default() -> Self {
        Self {
            grid: 64,
            step_tol: 1e-3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscordResult {
    pub discord: f64,
    pub mutual_information: f64,
    pub holevo_max: f64,
    pub setting: MeasurementSetting,
}

/// Mutual information minus the largest Holevo quantity over measurement
/// settings: a `grid x grid` scan over `theta in [0, pi)`, `phi in [0, 2pi)`
/// followed by coordinate ascent with step halving.
pub fn discord(
    psi: &PureState,
    layout: &QubitLayout,
    m: usize,
    opts: DiscordOptions,
) -> Result<DiscordResult> {
    if m == 0 {
        return Err(Error::Dimension("discord needs a fragment with m >= 1".into()));
    }
    if opts.grid == 0 || opts.step_tol.is_nan() || opts.step_tol <= 0.0 {
        return Err(Error::InvalidParams(format!("bad optimizer options {opts:?}")));
    }
    let mi = mutual_information(psi, layout, m)?;
    let surface = HolevoSurface::new(psi, layout, m)?;

    let g = opts.grid;
    let d_theta = PI / g as f64;
    let d_phi = 2.0 * PI / g as f64;
    let values: Vec<f64> = (0..g * g)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / g, idx % g);
            surface.eval(MeasurementSetting::normalized(i as f64 * d_theta, j as f64 * d_phi))
        })
        .collect();
    // Lowest (theta, phi) wins ties.
    let mut best_idx = 0;
    for (idx, &v) in values.iter().enumerate() {
        if v > values[best_idx] {
            best_idx = idx;
        }
    }
    let mut best = MeasurementSetting::normalized(
        (best_idx / g) as f64 * d_theta,
        (best_idx % g) as f64 * d_phi,
    );
    let mut best_val = values[best_idx];

    let (mut h_theta, mut h_phi) = (d_theta / 2.0, d_phi / 2.0);
    while h_theta >= opts.step_tol || h_phi >= opts.step_tol {
        let mut improved = false;
        let candidates = [
            (best.theta - h_theta, best.phi),
            (best.theta + h_theta, best.phi),
            (best.theta, best.phi - h_phi),
            (best.theta, best.phi + h_phi),
        ];
        for (theta, phi) in candidates {
            let s = MeasurementSetting::normalized(theta, phi);
            let v = surface.eval(s);
            if v > best_val {
                best = s;
                best_val = v;
                improved = true;
            }
        }
        if !improved {
            h_theta /= 2.0;
            h_phi /= 2.0;
        }
    }

    Ok(DiscordResult {
        discord: mi - best_val,
        mutual_information: mi,
        holevo_max: best_val,
        setting: best,
    })
}
