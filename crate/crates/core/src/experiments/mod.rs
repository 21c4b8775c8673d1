//! Scenario runner: configuration, characteristic times, CSV output.

mod config;
mod csv;
mod points;
mod run;

pub use config::{
    parse_config, ConfigOverrides, ScenarioConfig, ScenarioId, Sweep, DEFAULT_N, DEFAULT_RATIO,
    DEFAULT_SWEEP_RATIOS, DEFAULT_T_MAX,
};
pub use csv::{format_value, Table};
pub use points::{locate_points, locate_points_in, PointsABC, MIN_PLATEAU_HEIGHT, PLATEAU_LEVEL};
pub use run::{
    discord_table, fig2_table, fig3_table, inequality_table, mi_time_table, run_scenario,
    trajectory_for, STRONG_COUPLING_FLAG, WEAK_COUPLING_FLAG,
};
