//! Acceptance suite. Runs every criterion in sequence on shared trajectories
//! and prints one PASS/FAIL line per criterion; the test fails if any
//! criterion fails.
//!
//! Built without the libtest harness, so `cargo test -p qflow --test
//! acceptance` always shows the report. The default trajectory (N = 7,
//! 15 qubits, 1000 steps) dominates the runtime.

mod common;

use std::process::ExitCode;

use common::{expm_hermitian, kron_hamiltonian, naive_partial_trace, qubit_bloch, qubit_entropy, random_amplitudes};
use nalgebra::DVector;
use qflow::evolve::Propagator;
use qflow::experiments::{locate_points, PointsABC};
use qflow::hamiltonian::Hamiltonian;
use qflow::measures::{
    blp_accumulated, discord, env_distance_series, laine_series, mutual_information, sigma,
    system_distance_series, trace_distance, values, DiscordOptions,
};
use qflow::qreg::C64;
use qflow::reduce::partial_trace;
use qflow::{run_trajectory, Chain, DensityOp, ModelParams, PureState, Trajectory};

// Tolerances.
const INITIAL_TOL: f64 = 1e-12;
const ORACLE_FIDELITY_TOL: f64 = 1e-10;
const ORACLE_APPLY_TOL: f64 = 1e-12;
const ORACLE_TRACE_TOL: f64 = 1e-12;
const CONSERVATION_TOL: f64 = 1e-8;
const DARWINISM_TOL: f64 = 1e-10;
const DISCORD_TOL: f64 = 2e-3;
const DISCORD_MI_TOL: f64 = 4e-3;
const SLACK_TOL: f64 = -1e-9;
const CORR_SYMMETRY_TOL: f64 = 1e-10;
const CHAIN_SYMMETRY_TOL: f64 = 1e-10;

// Scenarios.
const DEFAULT_N: usize = 7;
const DEFAULT_RATIO: f64 = 0.71;
const DEFAULT_T_MAX: f64 = 20.0;
const DEFAULT_STEPS: usize = 1000;
const SMALL_ENV_N: usize = 6;
const SWEEP_N: [usize; 5] = [3, 4, 5, 6, 7];
const SWEEP_N_T_MAX: f64 = 8.0;
const SWEEP_RATIOS: [f64; 3] = [0.3, 0.5, 0.71];

#[derive(Default)]
struct Report {
    results: Vec<(String, bool)>,
}

impl Report {
    fn check(&mut self, name: &str, pass: bool, detail: String) {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        self.results.push((name.to_string(), pass));
    }

    fn finish(self) -> ExitCode {
        let failed: Vec<_> = self.results.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect();
        println!(
            "acceptance: {}/{} criteria passed",
            self.results.len() - failed.len(),
            self.results.len()
        );
        if failed.is_empty() {
            ExitCode::SUCCESS
        } else {
            println!("failed criteria: {failed:?}");
            ExitCode::FAILURE
        }
    }
}

fn fidelity(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm_sqr()
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn initial_conditions(r: &mut Report, traj: &Trajectory) {
    let d_s = trace_distance(
        &partial_trace(&traj.states_plus[0], &[0]).unwrap(),
        &partial_trace(&traj.states_minus[0], &[0]).unwrap(),
    )
    .unwrap();
    let d_e = values(&env_distance_series(traj).unwrap())[0];
    let pass = (d_s - 1.0).abs() <= INITIAL_TOL && d_e.abs() <= INITIAL_TOL;
    r.check(
        "initial conditions",
        pass,
        format!("D_S(0)-1 = {:.1e}, D_E(0) = {:.1e} (tol {INITIAL_TOL:e})", d_s - 1.0, d_e),
    );
}

fn oracle_equivalence(r: &mut Report) {
    let dt = 0.05;
    let steps = 200;
    let mut worst_fid: f64 = 0.0;
    let mut worst_apply: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    for n in 1..=2 {
        let params = ModelParams::dimensionless(n, DEFAULT_RATIO).unwrap();
        let dense = kron_hamiltonian(n, params.j_se, params.j_e);
        let u = expm_hermitian(&dense, dt);
        let prop = Propagator::from_params(&params);
        let nq = 2 * n + 1;

        for seed in 0..3 {
            let start = random_amplitudes(1 << nq, 100 + seed);
            let mut krylov = start.clone();
            let mut exact = DVector::from_vec(start);
            for _ in 0..steps {
                prop.step(&mut krylov, dt).unwrap();
                exact = &u * exact;
                worst_fid = worst_fid.max(1.0 - fidelity(&krylov, exact.as_slice()));
            }
        }

        let h = Hamiltonian::from_params(&params);
        for seed in 0..5 {
            let psi = random_amplitudes(1 << nq, 200 + seed);
            let mut out = vec![C64::new(0.0, 0.0); psi.len()];
            h.apply_into(&psi, &mut out);
            let reference = &dense * DVector::from_column_slice(&psi);
            worst_apply = worst_apply.max(max_abs(out.iter().zip(reference.iter()).map(|(a, b)| (a - b).norm())));
        }

        let psi = random_amplitudes(1 << nq, 300 + n as u64);
        let state = PureState::from_amplitudes(nq, psi.clone()).unwrap();
        for keep in [vec![0], vec![1, 2], vec![2, 0], (1..nq).collect::<Vec<_>>()] {
            let lib = partial_trace(&state, &keep).unwrap().to_dense().unwrap();
            let naive = naive_partial_trace(&psi, &keep);
            worst_trace = worst_trace.max(max_abs((lib - naive).iter().map(|z| z.norm())));
        }
    }
    let pass = worst_fid <= ORACLE_FIDELITY_TOL && worst_apply <= ORACLE_APPLY_TOL && worst_trace <= ORACLE_TRACE_TOL;
    r.check(
        "oracle equivalence",
        pass,
        format!(
            "N<=2, {steps} steps: max infidelity {worst_fid:.1e} (tol {ORACLE_FIDELITY_TOL:e}), apply {worst_apply:.1e}, partial trace {worst_trace:.1e} (tol {ORACLE_APPLY_TOL:e})"
        ),
    );
}

fn conservation(r: &mut Report, traj: &Trajectory) {
    let norm_drift = max_abs(
        traj.states_plus
            .iter()
            .chain(&traj.states_minus)
            .map(|s| (s.norm() - 1.0).abs()),
    );
    let energies = traj.energies();
    let (e0p, e0m) = energies[0];
    let energy_drift = max_abs(
        energies
            .iter()
            .flat_map(|&(p, m)| [((p - e0p) / e0p).abs(), ((m - e0m) / e0m).abs()]),
    );
    let pass = traj.len() > DEFAULT_STEPS && norm_drift <= CONSERVATION_TOL && energy_drift <= CONSERVATION_TOL;
    r.check(
        "conservation",
        pass,
        format!(
            "{} steps, dt {}: norm drift {norm_drift:.1e}, relative energy drift {energy_drift:.1e} (tol {CONSERVATION_TOL:e})",
            traj.len() - 1,
            traj.dt()
        ),
    );
}

fn darwinism(r: &mut Report, traj: &Trajectory, points: &PointsABC) {
    let layout = traj.params.layout;
    let n = layout.n_per_chain();
    let mut identity_err: f64 = 0.0;
    for psi in traj.states_plus.iter().chain(&traj.states_minus) {
        let s_sys = qubit_entropy(qubit_bloch(psi.amplitudes(), 0));
        let i_full = mutual_information(psi, &layout, n).unwrap();
        identity_err = identity_err.max((i_full - 2.0 * s_sys).abs());
    }
    let mut worst_drop: f64 = 0.0;
    for (_, i) in points.indices() {
        let mi: Vec<f64> = (1..=n)
            .map(|m| mutual_information(&traj.states_plus[i], &layout, m).unwrap())
            .collect();
        worst_drop = worst_drop.max(max_abs(mi.windows(2).map(|w| w[0] - w[1])));
    }
    let pass = identity_err <= DARWINISM_TOL && worst_drop <= DARWINISM_TOL;
    r.check(
        "darwinism identity",
        pass,
        format!(
            "max |I(S:F_N) - 2 S(rho_S)| = {identity_err:.1e} over {} states; largest decrease in m at A/B/C {worst_drop:.1e} (tol {DARWINISM_TOL:e})",
            2 * traj.len()
        ),
    );
}

fn discord_calibration(r: &mut Report, traj: &Trajectory, points: &PointsABC) {
    let layout = traj.params.layout;
    let n = layout.n_per_chain();
    let mut details = Vec::new();
    let mut pass = true;
    for (label, i) in points.indices() {
        let psi = &traj.states_plus[i];
        let s_sys = qubit_entropy(qubit_bloch(psi.amplitudes(), 0));
        let d = discord(psi, &layout, n, DiscordOptions::default()).unwrap();
        let e1 = (d.discord - s_sys).abs();
        let e2 = (d.mutual_information - 2.0 * d.discord).abs();
        pass &= e1 <= DISCORD_TOL && e2 <= DISCORD_MI_TOL;
        details.push(format!("{label}: |D-S|={e1:.1e} |I-2D|={e2:.1e}"));
    }
    r.check(
        "discord calibration",
        pass,
        format!("{} (tol {DISCORD_TOL:e}, {DISCORD_MI_TOL:e})", details.join(", ")),
    );
}

fn laine_bound(r: &mut Report, trajs: &[&Trajectory]) {
    let mut pass = true;
    let mut details = Vec::new();
    for traj in trajs {
        let terms = laine_series(traj).unwrap();
        let min_slack = terms.iter().map(|l| l.slack).fold(f64::INFINITY, f64::min);
        let corr_gap = max_abs(terms.iter().map(|l| (l.corr_plus - l.corr_minus).abs()));
        pass &= min_slack >= SLACK_TOL && corr_gap <= CORR_SYMMETRY_TOL;
        details.push(format!(
            "N={}: min slack {min_slack:.3e}, |corr+ - corr-| {corr_gap:.1e}",
            traj.params.layout.n_per_chain()
        ));
    }
    r.check(
        "laine bound",
        pass,
        format!("{} (tol {SLACK_TOL:e}, {CORR_SYMMETRY_TOL:e})", details.join("; ")),
    );
}

fn phenomenology(r: &mut Report, traj: &Trajectory, points: &PointsABC) {
    let d_s_series = system_distance_series(traj).unwrap();
    let d_e_series = env_distance_series(traj).unwrap();
    let (d_s, d_e) = (values(&d_s_series), values(&d_e_series));
    // First cycle: up to the first revival of D_S.
    let end = points.i_c;
    let argmax_e = (0..=end).fold(0, |best, i| if d_e[i] > d_e[best] { i } else { best });
    let argmin_s = (0..=end).fold(0, |best, i| if d_s[i] < d_s[best] { i } else { best });
    let sig = values(&sigma(&d_s_series).unwrap());
    let sign_changes = sig
        .windows(2)
        .filter(|w| (w[0] > 0.0 && w[1] < 0.0) || (w[0] < 0.0 && w[1] > 0.0))
        .count();
    let blp = blp_accumulated(&d_s_series);
    let pass = argmax_e.abs_diff(argmin_s) <= 1 && sign_changes >= 1 && blp > 0.0;
    r.check(
        "information-flow phenomenology",
        pass,
        format!(
            "argmax D_E at t={:.2}, argmin D_S at t={:.2} (first cycle); sigma_S sign changes {sign_changes}; BLP {blp:.4}",
            traj.times[argmax_e], traj.times[argmin_s]
        ),
    );
}

fn strictly_monotone(v: &[f64], increasing: bool) -> bool {
    v.windows(2).all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] })
}

fn timing_laws(r: &mut Report, default_points: &PointsABC, small_env: (&Trajectory, &PointsABC)) {
    let mut t_b = Vec::new();
    for n in SWEEP_N {
        let t = if n == DEFAULT_N {
            Ok(default_points.t_b)
        } else {
            let params = ModelParams::dimensionless(n, DEFAULT_RATIO).unwrap();
            let traj = run_trajectory(&params, SWEEP_N_T_MAX, (SWEEP_N_T_MAX / 0.02).round() as usize).unwrap();
            locate_points(&traj).map(|p| p.t_b)
        };
        t_b.push(t.unwrap_or(f64::NAN));
    }
    let mut t_a = Vec::new();
    for ratio in SWEEP_RATIOS {
        let t = if ratio == DEFAULT_RATIO {
            Ok(small_env.1.t_a)
        } else {
            let params = ModelParams::dimensionless(SMALL_ENV_N, ratio).unwrap();
            let traj = run_trajectory(&params, DEFAULT_T_MAX, DEFAULT_STEPS).unwrap();
            locate_points(&traj).map(|p| p.t_a)
        };
        t_a.push(t.unwrap_or(f64::NAN));
    }
    debug_assert_eq!(small_env.0.params.layout.n_per_chain(), SMALL_ENV_N);
    let pass = strictly_monotone(&t_b, true) && strictly_monotone(&t_a, false);
    r.check(
        "timing laws",
        pass,
        format!("t_B for N={SWEEP_N:?}: {t_b:?}; t_A for ratio={SWEEP_RATIOS:?} at N={SMALL_ENV_N}: {t_a:?}"),
    );
}

fn chain_symmetry(r: &mut Report, traj: &Trajectory) {
    let layout = traj.params.layout;
    let mut worst: f64 = 0.0;
    for psi in traj.states_plus.iter().chain(&traj.states_minus) {
        for k in 1..=layout.n_per_chain() {
            // Relabel both onto one qubit so the operators are comparable.
            let single = |chain| {
                let rho = partial_trace(psi, &[layout.index(chain, k)]).unwrap();
                DensityOp::dense(vec![0], rho.to_dense().unwrap()).unwrap()
            };
            let (a, b) = (single(Chain::A), single(Chain::B));
            worst = worst.max(trace_distance(&a, &b).unwrap());
        }
    }
    r.check(
        "chain symmetry",
        worst <= CHAIN_SYMMETRY_TOL,
        format!("max D(rho_a,k, rho_b,k) = {worst:.1e} (tol {CHAIN_SYMMETRY_TOL:e})"),
    );
}

fn main() -> ExitCode {
    let mut report = Report::default();
    oracle_equivalence(&mut report);

    let default_params = ModelParams::dimensionless(DEFAULT_N, DEFAULT_RATIO).unwrap();
    let default = run_trajectory(&default_params, DEFAULT_T_MAX, DEFAULT_STEPS).unwrap();
    let points = locate_points(&default).expect("points A/B/C on the default trajectory");
    println!(
        "default trajectory: N={DEFAULT_N}, ratio {DEFAULT_RATIO}, t_A={:.2} t_B={:.2} t_C={:.2}",
        points.t_a, points.t_b, points.t_c
    );

    initial_conditions(&mut report, &default);
    conservation(&mut report, &default);
    darwinism(&mut report, &default, &points);
    discord_calibration(&mut report, &default, &points);
    phenomenology(&mut report, &default, &points);
    chain_symmetry(&mut report, &default);

    let small_params = ModelParams::dimensionless(SMALL_ENV_N, DEFAULT_RATIO).unwrap();
    let small = run_trajectory(&small_params, DEFAULT_T_MAX, DEFAULT_STEPS).unwrap();
    let small_points = locate_points(&small).expect("points A/B/C at N=6");
    laine_bound(&mut report, &[&default, &small]);
    drop(default);
    timing_laws(&mut report, &points, (&small, &small_points));

    report.finish()
}
