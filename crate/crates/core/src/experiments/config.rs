//! Scenario configuration: a plain `key = value` file plus flag overrides.
//!
//! Recognized keys (case-insensitive): `scenario`, `n`, `ratio`, `tmax`,
//! `steps`, `out`, `threads`, `sweep_ratios`, `sweep_n`, `checkpoint`,
//! `discord_grid`. Lists are comma-separated. `#` starts a comment.
//!
//! Defaults: scenario `fig2`; `n = 7` (6 for `sm_inequality` and the
//! sweeps); `ratio = 0.71`; `tmax = 20`; `steps` chosen so that the grid
//! spacing is at most 0.02; output directory `out`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::evolve::default_steps;

pub const DEFAULT_N: usize = 7;
pub const DEFAULT_N_INEQUALITY: usize = 6;
pub const DEFAULT_N_SWEEP: usize = 6;
pub const DEFAULT_RATIO: f64 = 0.71;
pub const DEFAULT_T_MAX: f64 = 20.0;
pub const DEFAULT_SWEEP_RATIOS: [f64; 4] = [0.25, 0.5, 0.71, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    Fig2,
    Fig3,
    SmInequality,
    SmSweepJe,
    SmSweepJse,
    SmMiTime,
    SmDiscord,
    Custom,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 8] = [
        ScenarioId::Fig2,
        ScenarioId::Fig3,
        ScenarioId::SmInequality,
        ScenarioId::SmSweepJe,
        ScenarioId::SmSweepJse,
        ScenarioId::SmMiTime,
        ScenarioId::SmDiscord,
        ScenarioId::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioId::Fig2 => "fig2",
            ScenarioId::Fig3 => "fig3",
            ScenarioId::SmInequality => "sm_inequality",
            ScenarioId::SmSweepJe => "sm_sweep_je",
            ScenarioId::SmSweepJse => "sm_sweep_jse",
            ScenarioId::SmMiTime => "sm_mi_time",
            ScenarioId::SmDiscord => "sm_discord",
            ScenarioId::Custom => "custom",
        }
    }

    pub fn is_sweep(self) -> bool {
        matches!(self, ScenarioId::SmSweepJe | ScenarioId::SmSweepJse)
    }

    fn default_n(self) -> usize {
        match self {
            ScenarioId::SmInequality => DEFAULT_N_INEQUALITY,
            ScenarioId::SmSweepJe | ScenarioId::SmSweepJse => DEFAULT_N_SWEEP,
            _ => DEFAULT_N,
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioId::ALL
            .into_iter()
            .find(|id| id.name() == s.trim())
            .ok_or_else(|| {
                let known: Vec<_> = ScenarioId::ALL.iter().map(|id| id.name()).collect();
                Error::Config(format!("unknown scenario '{s}' (expected one of {})", known.join(", ")))
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sweep {
    /// Coupling ratios `J_SE / J_E` at fixed chain length.
    Ratios(Vec<f64>),
    /// Chain lengths at fixed coupling ratio.
    ChainLengths(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: ScenarioId,
    pub n: usize,
    pub ratio: f64,
    pub t_max: f64,
    pub n_steps: usize,
    pub out_dir: PathBuf,
    pub sweep: Option<Sweep>,
    pub threads: Option<usize>,
    pub checkpoint: Option<PathBuf>,
    pub discord_grid: usize,
}

impl ScenarioConfig {
    pub fn dt(&self) -> f64 {
        self.t_max / self.n_steps as f64
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ConfigOverrides::default().resolve().expect("defaults are valid")
    }
}

/// Partially specified configuration; every field is optional.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigOverrides {
    pub scenario: Option<ScenarioId>,
    pub n: Option<usize>,
    pub ratio: Option<f64>,
    pub t_max: Option<f64>,
    pub n_steps: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub sweep_ratios: Option<Vec<f64>>,
    pub sweep_n: Option<Vec<usize>>,
    pub threads: Option<usize>,
    pub checkpoint: Option<PathBuf>,
    pub discord_grid: Option<usize>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse value '{}' for key '{key}'", value.trim())))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

impl ConfigOverrides {
    /// Parse the text of a `key = value` config file.
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = ConfigOverrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value', got '{line}'", lineno + 1))
            })?;
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim();
            match key.as_str() {
                "scenario" => out.scenario = Some(value.parse()?),
                "n" => out.n = Some(parse_value(&key, value)?),
                "ratio" => out.ratio = Some(parse_value(&key, value)?),
                "tmax" | "t_max" => out.t_max = Some(parse_value(&key, value)?),
                "steps" => out.n_steps = Some(parse_value(&key, value)?),
                "out" => out.out_dir = Some(PathBuf::from(value)),
                "threads" => out.threads = Some(parse_value(&key, value)?),
                "sweep_ratios" => out.sweep_ratios = Some(parse_list(&key, value)?),
                "sweep_n" => out.sweep_n = Some(parse_list(&key, value)?),
                "checkpoint" => out.checkpoint = Some(PathBuf::from(value)),
                "discord_grid" => out.discord_grid = Some(parse_value(&key, value)?),
                _ => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key '{key}'",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(out)
    }

    /// Fields set in `other` win.
    pub fn merge(self, other: ConfigOverrides) -> Self {
        ConfigOverrides {
            scenario: other.scenario.or(self.scenario),
            n: other.n.or(self.n),
            ratio: other.ratio.or(self.ratio),
            t_max: other.t_max.or(self.t_max),
            n_steps: other.n_steps.or(self.n_steps),
            out_dir: other.out_dir.or(self.out_dir),
            sweep_ratios: other.sweep_ratios.or(self.sweep_ratios),
            sweep_n: other.sweep_n.or(self.sweep_n),
            threads: other.threads.or(self.threads),
            checkpoint: other.checkpoint.or(self.checkpoint),
            discord_grid: other.discord_grid.or(self.discord_grid),
        }
    }

    pub fn resolve(self) -> Result<ScenarioConfig> {
        let scenario = self.scenario.unwrap_or(ScenarioId::Fig2);
        let n = self.n.unwrap_or_else(|| scenario.default_n());
        if n == 0 {
            return Err(Error::Config("N must be >= 1".into()));
        }
        let ratio = self.ratio.unwrap_or(DEFAULT_RATIO);
        if !(ratio.is_finite() && ratio >= 0.0) {
            return Err(Error::Config(format!("ratio must be >= 0, got {ratio}")));
        }
        let t_max = self.t_max.unwrap_or(DEFAULT_T_MAX);
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::Config(format!("tmax must be > 0, got {t_max}")));
        }
        let n_steps = self.n_steps.unwrap_or_else(|| default_steps(t_max));
        if n_steps < 2 {
            return Err(Error::Config(format!("steps must be >= 2, got {n_steps}")));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be >= 1".into()));
        }
        let discord_grid = self.discord_grid.unwrap_or(64);
        if discord_grid == 0 {
            return Err(Error::Config("discord_grid must be >= 1".into()));
        }

        let sweep = match (self.sweep_ratios, self.sweep_n) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "sweep_ratios and sweep_n are mutually exclusive".into(),
                ))
            }
            (Some(r), None) => Some(Sweep::Ratios(r)),
            (None, Some(ns)) => Some(Sweep::ChainLengths(ns)),
            (None, None) if scenario.is_sweep() => {
                Some(Sweep::Ratios(DEFAULT_SWEEP_RATIOS.to_vec()))
            }
            (None, None) => None,
        };
        match &sweep {
            Some(_) if !scenario.is_sweep() => {
                return Err(Error::Config(format!(
                    "sweep lists given for non-sweep scenario '{scenario}'"
                )))
            }
            Some(Sweep::Ratios(r)) if r.is_empty() => {
                return Err(Error::Config("sweep_ratios is empty".into()))
            }
            Some(Sweep::ChainLengths(ns)) if ns.is_empty() => {
                return Err(Error::Config("sweep_n is empty".into()))
            }
            Some(Sweep::Ratios(r)) if r.iter().any(|x| !(x.is_finite() && *x >= 0.0)) => {
                return Err(Error::Config(format!("negative or non-finite ratio in {r:?}")))
            }
            Some(Sweep::ChainLengths(ns)) if ns.contains(&0) => {
                return Err(Error::Config("sweep_n entries must be >= 1".into()))
            }
            _ => {}
        }

        Ok(ScenarioConfig {
            scenario,
            n,
            ratio,
            t_max,
            n_steps,
            out_dir: self.out_dir.unwrap_or_else(|| PathBuf::from("out")),
            sweep,
            threads: self.threads,
            checkpoint: self.checkpoint,
            discord_grid,
        })
    }
}

/// Resolve a configuration from optional file text and flag overrides.
pub fn parse_config(file_text: Option<&str>, flags: ConfigOverrides) -> Result<ScenarioConfig> {
    let base = match file_text {
        Some(text) => ConfigOverrides::parse(text)?,
        None => ConfigOverrides::default(),
    };
    base.merge(flags).resolve()
}
