//! Information-theoretic functionals over trajectories and states.
//!
//! Trace distances use the half-trace-norm convention, so orthogonal pure
//! states are at distance 1. Entropies are in bits.

mod correlations;
mod distance;

pub use correlations::{
    discord, holevo, mutual_information, mutual_information_with, DiscordOptions, DiscordResult,
    HolevoSurface, MeasurementSetting,
};
pub use distance::{
    blp_accumulated, env_distance_series, env_qubit_distance_series, laine_series, laine_terms,
    sigma, system_distance_series, trace_distance, trace_distance_lowrank, LaineTerms,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesPoint {
    pub t: f64,
    pub value: f64,
}

pub type Series = Vec<SeriesPoint>;

pub fn values(series: &[SeriesPoint]) -> Vec<f64> {
    series.iter().map(|p| p.value).collect()
}

pub fn series_from(times: &[f64], values: impl IntoIterator<Item = f64>) -> Series {
    times
        .iter()
        .zip(values)
        .map(|(&t, value)| SeriesPoint { t, value })
        .collect()
}
