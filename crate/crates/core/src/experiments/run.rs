use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{ScenarioConfig, ScenarioId, Sweep};
use super::csv::Table;
use super::points::{locate_points, locate_points_in, PointsABC, MIN_PLATEAU_HEIGHT, PLATEAU_LEVEL};
use crate::error::{Error, Result};
use crate::evolve::checkpoint::{read_checkpoint, write_checkpoint};
use crate::evolve::{run_trajectory, Trajectory};
use crate::hamiltonian::{ModelParams, J_E_PHYSICAL};
use crate::measures::{
    discord, env_distance_series, env_qubit_distance_series, laine_series, mutual_information,
    mutual_information_with, sigma, system_distance_series, values, DiscordOptions,
};
use crate::qreg::{Chain, QubitLayout};

/// Ratios at or above this are flagged as `J_SE ~ J_E`.
pub const STRONG_COUPLING_FLAG: f64 = 0.9;
/// Ratios at or below this are flagged as `J_SE << J_E`.
pub const WEAK_COUPLING_FLAG: f64 = 0.2;

fn params_line(scenario: ScenarioId, traj: &Trajectory) -> String {
    let p = &traj.params;
    let n_steps = traj.len() - 1;
    format!(
        "params: scenario={scenario} N={} total_qubits={} j_se_over_je={} j_e={} j_e_rad_per_s={J_E_PHYSICAL} t_max={} n_steps={n_steps} dt={} time=J_E*tau entropy=bits",
        p.layout.n_per_chain(),
        p.layout.total_qubits(),
        p.ratio(),
        p.j_e,
        traj.times[n_steps],
        traj.dt(),
    )
}

fn points_line(points: &Result<PointsABC>) -> String {
    let thresholds = format!("plateau_level={PLATEAU_LEVEL} min_height={MIN_PLATEAU_HEIGHT:e}");
    match points {
        Ok(p) => format!(
            "points: t_A={:?} t_B={:?} t_C={:?} i_A={} i_B={} i_C={} {thresholds}",
            p.t_a, p.t_b, p.t_c, p.i_a, p.i_b, p.i_c
        ),
        Err(e) => format!("points: none ({e}) {thresholds}"),
    }
}

/// `t, D_S, D_E, D_E_1..D_E_N, sigma_S, sigma_E`, with the located points
/// (or the reason they are missing) in the metadata.
pub fn fig2_table(scenario: ScenarioId, traj: &Trajectory) -> Result<(Table, Result<PointsABC>)> {
    let n = traj.params.layout.n_per_chain();
    let d_s = system_distance_series(traj)?;
    let d_e = env_distance_series(traj)?;
    let per_qubit = (1..=n)
        .map(|k| env_qubit_distance_series(traj, Chain::A, k).map(|s| values(&s)))
        .collect::<Result<Vec<_>>>()?;
    let s_s = values(&sigma(&d_s)?);
    let s_e = values(&sigma(&d_e)?);
    let (d_s, d_e) = (values(&d_s), values(&d_e));
    let points = locate_points_in(&traj.times, &d_s, &d_e);

    let mut header = vec!["t".to_string(), "D_S".into(), "D_E".into()];
    header.extend((1..=n).map(|k| format!("D_E_{k}")));
    header.extend(["sigma_S".into(), "sigma_E".into()]);
    let mut table = Table::new(header);
    table.meta(params_line(scenario, traj));
    table.meta(points_line(&points));
    table.meta("D_E_k: single qubit at position k of chain a");
    for i in 0..traj.len() {
        let mut row = vec![traj.times[i], d_s[i], d_e[i]];
        row.extend(per_qubit.iter().map(|col| col[i]));
        row.extend([s_s[i], s_e[i]]);
        table.push(row)?;
    }
    Ok((table, points))
}

/// `m, I_at_A, I_at_B, I_at_C` on the `psi(+)` branch.
pub fn fig3_table(scenario: ScenarioId, traj: &Trajectory, points: &PointsABC) -> Result<Table> {
    let layout = traj.params.layout;
    let n = layout.n_per_chain();
    let idx = points.indices();
    let cols = idx
        .par_iter()
        .map(|&(_, i)| {
            (1..=n)
                .map(|m| mutual_information(&traj.states_plus[i], &layout, m))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(vec!["m".into(), "I_at_A".into(), "I_at_B".into(), "I_at_C".into()]);
    table.meta(params_line(scenario, traj));
    table.meta(points_line(&Ok(*points)));
    table.meta("I(S:F_m) in bits; F_m = positions 1..m of both chains; state psi(+)");
    for m in 1..=n {
        table.push(vec![m as f64, cols[0][m - 1], cols[1][m - 1], cols[2][m - 1]])?;
    }
    Ok(table)
}

/// `t, lhs_sup, d_env, corr_plus, corr_minus, slack`.
pub fn inequality_table(scenario: ScenarioId, traj: &Trajectory) -> Result<Table> {
    let terms = laine_series(traj)?;
    let mut table = Table::new(
        ["t", "lhs_sup", "d_env", "corr_plus", "corr_minus", "slack"]
            .map(String::from)
            .to_vec(),
    );
    table.meta(params_line(scenario, traj));
    table.meta("lhs_sup = sup_{t>=tau} D_S(t) - D_S(tau); slack = d_env + corr_plus + corr_minus - lhs_sup");
    for l in terms {
        table.push(vec![l.t, l.lhs_sup, l.d_env, l.corr_plus, l.corr_minus, l.slack])?;
    }
    Ok(table)
}

/// `t, I_F1..I_FN, I_q1..I_qN` on the `psi(+)` branch.
pub fn mi_time_table(scenario: ScenarioId, traj: &Trajectory) -> Result<Table> {
    let layout = traj.params.layout;
    let n = layout.n_per_chain();
    let rows = (0..traj.len())
        .into_par_iter()
        .map(|i| {
            let psi = &traj.states_plus[i];
            let mut row = vec![traj.times[i]];
            for m in 1..=n {
                row.push(mutual_information(psi, &layout, m)?);
            }
            for k in 1..=n {
                row.push(mutual_information_with(psi, &[layout.index(Chain::A, k)])?);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|m| format!("I_F{m}")));
    header.extend((1..=n).map(|k| format!("I_q{k}")));
    let mut table = Table::new(header);
    table.meta(params_line(scenario, traj));
    table.meta("I_Fm = I(S:F_m); I_qk = I(S:qubit k of chain a); bits; state psi(+)");
    for row in rows {
        table.push(row)?;
    }
    Ok(table)
}

/// `m, discord, mutual_information, holevo_max` at one grid point.
pub fn discord_table(
    scenario: ScenarioId,
    traj: &Trajectory,
    label: char,
    index: usize,
    opts: DiscordOptions,
) -> Result<Table> {
    let layout = traj.params.layout;
    let psi = &traj.states_plus[index];
    let mut table = Table::new(
        ["m", "discord", "mutual_information", "holevo_max"]
            .map(String::from)
            .to_vec(),
    );
    table.meta(params_line(scenario, traj));
    table.meta(format!(
        "point: {label} t={:?} index={index} grid={} step_tol={:e} state=psi(+)",
        traj.times[index], opts.grid, opts.step_tol
    ));
    for m in 1..=layout.n_per_chain() {
        let r = discord(psi, &layout, m, opts)?;
        table.push(vec![m as f64, r.discord, r.mutual_information, r.holevo_max])?;
    }
    Ok(table)
}

fn checkpoint_matches(traj: &Trajectory, params: &ModelParams, t_max: f64, n_steps: usize) -> bool {
    traj.params == *params
        && traj.len() == n_steps + 1
        && (traj.times[n_steps] - t_max).abs() <= 1e-12 * t_max
}

/// Trajectory for the configured parameters, reusing or creating the
/// checkpoint file when one is configured.
pub fn trajectory_for(cfg: &ScenarioConfig, params: &ModelParams) -> Result<Trajectory> {
    if let Some(path) = &cfg.checkpoint {
        if path.exists() {
            let traj = read_checkpoint(path)?;
            if !checkpoint_matches(&traj, params, cfg.t_max, cfg.n_steps) {
                return Err(Error::Config(format!(
                    "checkpoint {} does not match the configured parameters",
                    path.display()
                )));
            }
            return Ok(traj);
        }
    }
    let traj = run_trajectory(params, cfg.t_max, cfg.n_steps)?;
    if let Some(path) = &cfg.checkpoint {
        write_checkpoint(&traj, path)?;
    }
    Ok(traj)
}

fn write(out: &Path, name: &str, table: &Table, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = out.join(name);
    table.write(&path)?;
    written.push(path);
    Ok(())
}

fn regime_flag(ratio: f64) -> Option<&'static str> {
    if ratio >= STRONG_COUPLING_FLAG {
        Some("J_SE ~ J_E")
    } else if ratio <= WEAK_COUPLING_FLAG {
        Some("J_SE << J_E")
    } else {
        None
    }
}

fn run_sweep(cfg: &ScenarioConfig, sweep: &Sweep, written: &mut Vec<PathBuf>) -> Result<()> {
    let jse = cfg.scenario == ScenarioId::SmSweepJse;
    // (file stem, reported parameter, params)
    let points: Vec<(String, f64, ModelParams)> = match sweep {
        Sweep::Ratios(rs) => rs
            .iter()
            .map(|&r| {
                let reported = if jse { r } else { 1.0 / r };
                Ok((format!("ratio_{r}"), reported, ModelParams::dimensionless(cfg.n, r)?))
            })
            .collect::<Result<_>>()?,
        Sweep::ChainLengths(ns) => ns
            .iter()
            .map(|&n| Ok((format!("n_{n}"), n as f64, ModelParams::dimensionless(n, cfg.ratio)?)))
            .collect::<Result<_>>()?,
    };
    let param_name = match (sweep, jse) {
        (Sweep::ChainLengths(_), _) => "N",
        (Sweep::Ratios(_), true) => "J_SE/J_E",
        (Sweep::Ratios(_), false) => "J_E/J_SE",
    };

    let mut summary = Table::new(vec!["param".into(), "t_A".into(), "t_B".into()]);
    summary.meta(format!(
        "params: scenario={} swept={param_name} N={} j_se_over_je={} t_max={} n_steps={} dt={} time=J_E*tau",
        cfg.scenario,
        cfg.n,
        cfg.ratio,
        cfg.t_max,
        cfg.n_steps,
        cfg.dt()
    ));
    summary.meta(format!(
        "timing-law regimes flagged at J_SE/J_E >= {STRONG_COUPLING_FLAG} (J_SE ~ J_E) and <= {WEAK_COUPLING_FLAG} (J_SE << J_E)"
    ));
    // Sequential over points: each already runs its branches and measures
    // in parallel, and large trajectories dominate memory.
    for (stem, reported, params) in points {
        let traj = run_trajectory(&params, cfg.t_max, cfg.n_steps)?;
        let (table, found) = fig2_table(cfg.scenario, &traj)?;
        write(&cfg.out_dir, &format!("{}_{stem}.csv", cfg.scenario), &table, written)?;
        if let Some(flag) = regime_flag(params.ratio()) {
            summary.meta(format!("flag: param={reported} regime {flag}"));
        }
        let (t_a, t_b) = match found {
            Ok(p) => (p.t_a, p.t_b),
            Err(e) => {
                summary.meta(format!("flag: param={reported} {e}"));
                (f64::NAN, f64::NAN)
            }
        };
        summary.push(vec![reported, t_a, t_b])?;
    }
    write(&cfg.out_dir, &format!("{}_summary.csv", cfg.scenario), &summary, written)
}

fn run_inner(cfg: &ScenarioConfig, written: &mut Vec<PathBuf>) -> Result<()> {
    fs::create_dir_all(&cfg.out_dir)?;
    let scenario = cfg.scenario;
    if let Some(sweep) = &cfg.sweep {
        if cfg.checkpoint.is_some() {
            return Err(Error::Config("checkpoints are not supported for sweeps".into()));
        }
        return run_sweep(cfg, sweep, written);
    }
    let params = ModelParams::new(QubitLayout::new(cfg.n)?, cfg.ratio, 1.0)?;
    let traj = trajectory_for(cfg, &params)?;
    let out = &cfg.out_dir;
    match scenario {
        ScenarioId::Fig2 | ScenarioId::Custom => {
            let (table, _) = fig2_table(scenario, &traj)?;
            write(out, &format!("{scenario}.csv"), &table, written)?;
        }
        ScenarioId::Fig3 => {
            let points = locate_points(&traj)?;
            write(out, "fig3.csv", &fig3_table(scenario, &traj, &points)?, written)?;
        }
        ScenarioId::SmInequality => {
            write(out, "sm_inequality.csv", &inequality_table(scenario, &traj)?, written)?;
        }
        ScenarioId::SmMiTime => {
            write(out, "sm_mi_time.csv", &mi_time_table(scenario, &traj)?, written)?;
        }
        ScenarioId::SmDiscord => {
            let points = locate_points(&traj)?;
            let opts = DiscordOptions {
                grid: cfg.discord_grid,
                ..Default::default()
            };
            for (label, i) in points.indices() {
                let table = discord_table(scenario, &traj, label, i, opts)?;
                write(out, &format!("sm_discord_{label}.csv"), &table, written)?;
            }
        }
        ScenarioId::SmSweepJe | ScenarioId::SmSweepJse => unreachable!("sweeps always carry a list"),
    }
    Ok(())
}

/// Run one scenario and return the paths of the CSV files written.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    run_inner(cfg, &mut written).map_err(|e| e.in_scenario(cfg.scenario.name()))?;
    Ok(written)
}
