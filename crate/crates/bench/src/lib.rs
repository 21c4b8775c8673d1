//! Shared fixtures for the criterion benchmarks.

use qflow::evolve::Propagator;
use qflow::{make_initial_states, ModelParams, PureState};

/// State `psi^(+)` after evolving to `t` on the default model with `n` per chain.
pub fn evolved_state(n: usize, ratio: f64, t: f64) -> (ModelParams, PureState) {
    let params = ModelParams::dimensionless(n, ratio).expect("valid model");
    let (mut plus, _) = make_initial_states(params.layout);
    Propagator::from_params(&params)
        .step(plus.amplitudes_mut(), t)
        .expect("propagation converges");
    (params, plus)
}
