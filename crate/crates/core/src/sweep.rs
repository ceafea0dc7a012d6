//! Batch integration over initial-condition grids.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{integrate, IntegrationConfig, Trajectory, Verdict};
use crate::lyapunov::RoaSet;
use crate::params::{omega_to_hz, GeneratorParams, ModelKind, SimState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl GridAxis {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.n == 0 || !(self.min.is_finite() && self.max.is_finite()) || self.max < self.min {
            return Err(Error::InvalidConfig(format!("bad grid axis {self:?}")));
        }
        if self.n == 1 {
            return Ok(vec![self.min]);
        }
        let step = (self.max - self.min) / (self.n - 1) as f64;
        Ok((0..self.n).map(|i| self.min + step * i as f64).collect())
    }
}

/// Rows run over `omega`; columns over the second coordinate when present.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub omega: GridAxis,
    pub delta: Option<GridAxis>,
    pub xi: Option<GridAxis>,
}

impl Grid {
    /// Row-major initial states.
    pub fn states(&self) -> Result<Vec<SimState>> {
        if self.delta.is_some() && self.xi.is_some() {
            return Err(Error::InvalidConfig("grid may span delta or xi, not both".into()));
        }
        let omegas = self.omega.values()?;
        let cols: Vec<Option<f64>> = match self.delta.or(self.xi) {
            Some(axis) => axis.values()?.into_iter().map(Some).collect(),
            None => vec![None],
        };
        let mut out = Vec::with_capacity(omegas.len() * cols.len());
        for &w in &omegas {
            for &c in &cols {
                out.push(SimState {
                    omega: w,
                    delta: if self.delta.is_some() { c } else { None },
                    xi: if self.xi.is_some() { c } else { None },
                });
            }
        }
        Ok(out)
    }

    pub fn columns(&self) -> usize {
        self.delta.or(self.xi).map_or(1, |a| a.n)
    }
}

/// How close a converged run must end to the set's equilibrium.
/// Convergence tolerances of a basin sweep; missing keys keep their defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasinTolerance {
    pub angle: f64,
    pub frequency_hz: f64,
    pub xi: f64,
}

impl Default for BasinTolerance {
    fn default() -> Self {
        Self { angle: 1e-3, frequency_hz: 1e-3, xi: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasinCell {
    pub row: usize,
    pub col: usize,
    pub initial: SimState,
    pub in_set: bool,
    pub exceptional: bool,
    pub verdict: Verdict,
    pub t_end: f64,
    pub final_state: SimState,
    /// Converged to the analytic equilibrium within tolerance.
    pub at_equilibrium: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasinReport {
    pub model: ModelKind,
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<BasinCell>,
}

impl BasinReport {
    /// In-set, non-exceptional cells that did not settle at the equilibrium.
    pub fn violations(&self) -> Vec<&BasinCell> {
        self.cells
            .iter()
            .filter(|c| c.in_set && !c.exceptional && !c.at_equilibrium)
            .collect()
    }

    pub fn count(&self, pred: impl Fn(&BasinCell) -> bool) -> usize {
        self.cells.iter().filter(|c| pred(c)).count()
    }
}

fn near(a: &SimState, b: &SimState, tol: &BasinTolerance) -> bool {
    let freq = (omega_to_hz(a.omega) - omega_to_hz(b.omega)).abs() <= tol.frequency_hz;
    let angle = match (a.delta, b.delta) {
        (Some(x), Some(y)) => (x - y).abs() <= tol.angle,
        _ => true,
    };
    let xi = match (a.xi, b.xi) {
        (Some(x), Some(y)) => (x - y).abs() <= tol.xi,
        _ => true,
    };
    freq && angle && xi
}

/// Integrates every state independently, preserving input order.
pub fn integrate_many(
    model: ModelKind,
    p: &GeneratorParams,
    states: &[SimState],
    cfg: &IntegrationConfig,
) -> Vec<Result<Trajectory>> {
    states.par_iter().map(|s| integrate(model, p, s, cfg)).collect()
}

/// Classifies every grid cell and checks it against the analytic set `set`.
/// Trajectory samples are not retained.
pub fn basin_sweep(
    model: ModelKind,
    p: &GeneratorParams,
    grid: &Grid,
    set: Option<&RoaSet>,
    cfg: &IntegrationConfig,
    tol: &BasinTolerance,
) -> Result<BasinReport> {
    let states = grid.states()?;
    let cols = grid.columns();
    let cfg = IntegrationConfig { record_every: usize::MAX, lyapunov: None, ..*cfg };
    let target = set.map(RoaSet::equilibrium);
    let cells = states
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let tr = integrate(model, p, s, &cfg)?;
            let in_set = match set {
                Some(set) => set.contains(s)?,
                None => false,
            };
            let final_state = tr.final_state();
            let at_equilibrium = match (&tr.verdict, &target) {
                (Verdict::Converged { to }, Some(eq)) => near(to, eq, tol),
                _ => false,
            };
            Ok(BasinCell {
                row: i / cols,
                col: i % cols,
                initial: *s,
                in_set,
                exceptional: set.is_some_and(|set| set.is_exceptional(s)),
                verdict: tr.verdict,
                t_end: tr.final_time(),
                final_state,
                at_equilibrium,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BasinReport { model, rows: grid.omega.n, cols, cells })
}
