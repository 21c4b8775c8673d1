//! Location of the characteristic times A, B, C on a trajectory.
//!
//! A is the first local maximum of `D_E`. The plateau that follows is the
//! contiguous stretch where `D_E` stays at or above `PLATEAU_LEVEL` times its
//! value at A; B is its last grid time. C is the first local maximum of
//! `D_S` after B.

use crate::error::{Error, Result};
use crate::evolve::Trajectory;
use crate::measures::{env_distance_series, system_distance_series, values};

/// Fraction of `D_E(t_A)` that bounds the plateau from below.
pub const PLATEAU_LEVEL: f64 = 0.8;
/// `D_E` maxima below this do not count as a plateau.
pub const MIN_PLATEAU_HEIGHT: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointsABC {
    pub t_a: f64,
    pub t_b: f64,
    pub t_c: f64,
    pub i_a: usize,
    pub i_b: usize,
    pub i_c: usize,
}

impl PointsABC {
    pub fn indices(&self) -> [(char, usize); 3] {
        [('A', self.i_a), ('B', self.i_b), ('C', self.i_c)]
    }
}

fn is_local_max(v: &[f64], i: usize) -> bool {
    i >= 1 && i + 1 < v.len() && v[i] >= v[i - 1] && v[i] > v[i + 1]
}

fn no_plateau(detail: &str) -> Error {
    Error::NoPlateau(format!(
        "{detail} (plateau level {PLATEAU_LEVEL} x D_E(t_A), minimum height {MIN_PLATEAU_HEIGHT:e})"
    ))
}

/// Locate A, B, C from precomputed `D_S` and `D_E` values on `times`.
pub fn locate_points_in(times: &[f64], d_s: &[f64], d_e: &[f64]) -> Result<PointsABC> {
    if times.len() != d_s.len() || times.len() != d_e.len() {
        return Err(Error::Dimension("series lengths differ".into()));
    }
    let i_a = (1..d_e.len())
        .find(|&i| is_local_max(d_e, i))
        .ok_or_else(|| no_plateau("D_E has no local maximum"))?;
    if d_e[i_a] < MIN_PLATEAU_HEIGHT {
        return Err(no_plateau(&format!(
            "first D_E maximum {:e} is too small",
            d_e[i_a]
        )));
    }
    let level = PLATEAU_LEVEL * d_e[i_a];
    let mut i_b = i_a;
    while i_b + 1 < d_e.len() && d_e[i_b + 1] >= level {
        i_b += 1;
    }
    if i_b + 1 == d_e.len() {
        return Err(no_plateau("D_E plateau does not end before t_max"));
    }
    if i_b == i_a {
        return Err(no_plateau("D_E drops right after its first maximum"));
    }
    let i_c = (i_b + 1..d_s.len())
        .find(|&i| is_local_max(d_s, i))
        .ok_or_else(|| no_plateau("no D_S revival after the plateau"))?;
    Ok(PointsABC {
        t_a: times[i_a],
        t_b: times[i_b],
        t_c: times[i_c],
        i_a,
        i_b,
        i_c,
    })
}

pub fn locate_points(traj: &Trajectory) -> Result<PointsABC> {
    let d_s = values(&system_distance_series(traj)?);
    let d_e = values(&env_distance_series(traj)?);
    locate_points_in(&traj.times, &d_s, &d_e)
}
