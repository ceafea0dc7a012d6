//! Boundary sampling of Lyapunov sublevel sets by bisection along rays from
//! the equilibrium.

use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::lyapunov::{RoaConstants, RoaKind, RoaSet};
use crate::params::SimState;

pub const MIN_RESOLUTION: usize = 8;

const MARCH_STEP: f64 = 0.02;
const MARCH_LIMIT: f64 = 16.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum LevelSetSample {
    /// One-dimensional sets: the two speeds where `V = level`.
    Interval { lower: f64, upper: f64 },
    /// Closed polyline in the `(x, omega)` plane, `x` being `delta` or `xi`.
    Curve { x_label: &'static str, points: Vec<[f64; 2]> },
}

struct Ray<'a> {
    set: &'a RoaSet,
    origin: SimState,
    dx: f64,
    dy: f64,
}

impl Ray<'_> {
    fn at(&self, r: f64) -> SimState {
        let mut s = self.origin;
        s.omega += r * self.dy;
        if let Some(d) = s.delta.as_mut() {
            *d += r * self.dx;
        }
        if let Some(x) = s.xi.as_mut() {
            *x += r * self.dx;
        }
        s
    }

    fn excess(&self, r: f64) -> Result<f64> {
        Ok(self.set.value(&self.at(r))? - self.set.level)
    }

    /// First crossing of the level along the ray.
    fn crossing(&self) -> Result<SimState> {
        let mut lo = 0.0;
        let mut hi = MARCH_STEP;
        while self.excess(hi)? <= 0.0 {
            lo = hi;
            hi += MARCH_STEP;
            if hi > MARCH_LIMIT {
                return Err(Error::Numerical("level set is unbounded along a sampling ray".into()));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.excess(mid)? <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        Ok(self.at(0.5 * (lo + hi)))
    }
}

/// Samples `{V = level}` for `set`. Two-dimensional sets get `resolution`
/// points at equally spaced ray angles, ordered counter-clockwise from the
/// `+x` axis in scaled coordinates.
pub fn level_set_sample(set: &RoaSet, resolution: usize) -> Result<LevelSetSample> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidConfig(format!(
            "level-set resolution must be at least {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    let origin = set.equilibrium();
    let p = set.params();
    let (x_scale, y_scale, x_label) = match (set.kind, set.constants) {
        (RoaKind::OmegaS | RoaKind::OmegaK, RoaConstants::Speed { omega_s, omega_u, .. }) => {
            let scale = (omega_s - omega_u).abs().max(1e-9 * p.omega_star());
            let up = Ray { set, origin, dx: 0.0, dy: scale }.crossing()?;
            let down = Ray { set, origin, dx: 0.0, dy: -scale }.crossing()?;
            return Ok(LevelSetSample::Interval { lower: down.omega, upper: up.omega });
        }
        (RoaKind::OvalO, RoaConstants::Oval { j, omega_star, .. }) => (j.sqrt() * omega_star, omega_star, "xi"),
        (_, RoaConstants::Smib(_)) => {
            let inertia = match set.kind {
                RoaKind::SmibLevelSet => p.j(),
                _ => p.m(),
            };
            (FRAC_PI_2, (2.0 * set.level / inertia).sqrt(), "delta")
        }
        _ => unreachable!("constants always match kind"),
    };
    let mut points = Vec::with_capacity(resolution);
    for k in 0..resolution {
        let theta = 2.0 * PI * k as f64 / resolution as f64;
        let ray = Ray { set, origin, dx: theta.cos() * x_scale, dy: theta.sin() * y_scale };
        let s = ray.crossing()?;
        let x = s.delta.or(s.xi).expect("two-dimensional set");
        points.push([x, s.omega]);
    }
    Ok(LevelSetSample::Curve { x_label, points })
}
