//! Fixed-step classical Runge-Kutta integration with singularity, divergence
//! and convergence detection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lyapunov::{RoaKind, RoaSet};
use crate::params::{Derivative, GeneratorParams, ModelKind, SimState};

/// Consecutive calm steps required before a run is declared converged.
pub const CALM_STEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    pub dt: f64,
    pub t_max: f64,
    /// Threshold on the Euclidean norm of the state derivative.
    pub conv_tol: f64,
    /// A run diverges once `|ω − ω*|` exceeds this (rad/s).
    pub div_bound: f64,
    /// Infinite-bus runs also diverge once `|δ|` exceeds this (rad).
    #[serde(default)]
    pub angle_bound: Option<f64>,
    /// Evaluate this set's Lyapunov function and its rate at every recorded sample.
    #[serde(default)]
    pub lyapunov: Option<RoaKind>,
    /// Keep every n-th step; the initial and final states are always kept.
    pub record_every: usize,
}

impl IntegrationConfig {
    pub fn default_for(p: &GeneratorParams) -> Self {
        Self {
            dt: 1e-4,
            t_max: 300.0,
            conv_tol: 1e-6,
            div_bound: 10.0 * p.omega_star(),
            angle_bound: None,
            lyapunov: None,
            record_every: 100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        if !(self.t_max.is_finite() && self.t_max >= self.dt) {
            return bad(format!("t_max must be >= dt, got {}", self.t_max));
        }
        if !(self.conv_tol > 0.0) {
            return bad(format!("conv_tol must be > 0, got {}", self.conv_tol));
        }
        if !(self.div_bound > 0.0) {
            return bad(format!("div_bound must be > 0, got {}", self.div_bound));
        }
        if let Some(b) = self.angle_bound {
            if !(b > 0.0) {
                return bad(format!("angle_bound must be > 0, got {b}"));
            }
        }
        if self.record_every == 0 {
            return bad("record_every must be >= 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub state: SimState,
    #[serde(rename = "V")]
    pub v: Option<f64>,
    #[serde(rename = "Vdot")]
    pub vdot: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Converged { to: SimState },
    Diverged,
    HitSingularity { t: f64 },
    MaxTime,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Converged { .. } => "converged",
            Verdict::Diverged => "diverged",
            Verdict::HitSingularity { .. } => "hit_singularity",
            Verdict::MaxTime => "max_time",
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, Verdict::Converged { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub model: ModelKind,
    pub samples: Vec<Sample>,
    pub verdict: Verdict,
    /// Steps actually taken.
    pub steps: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> SimState {
        self.samples.last().expect("trajectory always holds the initial sample").state
    }

    pub fn final_time(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }
}

struct Probe(Option<RoaSet>);

impl Probe {
    fn sample(&self, t: f64, state: SimState) -> Sample {
        let (v, vdot) = match &self.0 {
            Some(set) => (set.value(&state).ok(), set.rate(&state).ok()),
            None => (None, None),
        };
        Sample { t, state, v, vdot }
    }
}

enum StepOutcome {
    Ok(SimState),
    Singular,
}

fn rk4_step(
    model: ModelKind,
    p: &GeneratorParams,
    s: &SimState,
    k1: &Derivative,
    dt: f64,
) -> Result<StepOutcome> {
    let stage = |x: &SimState| match model.rhs(p, x) {
        Ok(d) => Ok(Some(d)),
        Err(Error::SingularState { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    let Some(k2) = stage(&s.advanced(0.5 * dt, k1))? else { return Ok(StepOutcome::Singular) };
    let Some(k3) = stage(&s.advanced(0.5 * dt, &k2))? else { return Ok(StepOutcome::Singular) };
    let Some(k4) = stage(&s.advanced(dt, &k3))? else { return Ok(StepOutcome::Singular) };
    let slope = Derivative::combine_rk4(k1, &k2, &k3, &k4);
    Ok(StepOutcome::Ok(s.advanced(dt, &slope)))
}

/// Integrates `model` from `s0` and classifies the outcome.
pub fn integrate(
    model: ModelKind,
    p: &GeneratorParams,
    s0: &SimState,
    cfg: &IntegrationConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    model.check_shape(s0)?;
    let probe = Probe(match cfg.lyapunov {
        Some(kind) => Some(RoaSet::build(kind, p, 0.0)?),
        None => None,
    });

    let mut samples = vec![probe.sample(0.0, *s0)];
    let finish = |samples: Vec<Sample>, verdict, steps| Trajectory { model, samples, verdict, steps };

    let mut k1 = match model.rhs(p, s0) {
        Ok(d) => d,
        Err(Error::SingularState { .. }) => {
            return Ok(finish(samples, Verdict::HitSingularity { t: 0.0 }, 0));
        }
        Err(e) => return Err(e),
    };

    let n_steps = (cfg.t_max / cfg.dt - 1e-9).ceil() as usize;
    let mut state = *s0;
    let mut calm = if k1.norm() < cfg.conv_tol { 1 } else { 0 };
    let mut t_prev = 0.0;

    for step in 1..=n_steps {
        let t = step as f64 * cfg.dt;
        let record = |samples: &mut Vec<Sample>, s: SimState| {
            if samples.last().is_none_or(|last| last.t < t) {
                samples.push(probe.sample(t, s));
            }
        };
        let next = match rk4_step(model, p, &state, &k1, cfg.dt)? {
            StepOutcome::Ok(next) => next,
            StepOutcome::Singular => {
                if samples.last().is_some_and(|last| last.t < t_prev) {
                    samples.push(probe.sample(t_prev, state));
                }
                return Ok(finish(samples, Verdict::HitSingularity { t: t_prev }, step - 1));
            }
        };
        state = next;

        let blown = !state.is_finite()
            || (state.omega - p.omega_star()).abs() > cfg.div_bound
            || matches!((cfg.angle_bound, state.delta), (Some(b), Some(d)) if d.abs() > b);
        if blown {
            record(&mut samples, state);
            return Ok(finish(samples, Verdict::Diverged, step));
        }

        k1 = match model.rhs(p, &state) {
            Ok(d) => d,
            Err(Error::SingularState { .. }) => {
                record(&mut samples, state);
                return Ok(finish(samples, Verdict::HitSingularity { t }, step));
            }
            Err(e) => return Err(e),
        };
        calm = if k1.norm() < cfg.conv_tol { calm + 1 } else { 0 };

        if calm >= CALM_STEPS {
            record(&mut samples, state);
            return Ok(finish(samples, Verdict::Converged { to: state }, step));
        }
        if step % cfg.record_every == 0 || step == n_steps {
            record(&mut samples, state);
        }
        t_prev = t;
    }
    Ok(finish(samples, Verdict::MaxTime, n_steps))
}

/// Step-halving error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepCheck {
    /// Largest state difference between the `dt` and `dt/2` runs at shared sample times.
    pub max_diff: f64,
    pub compared: usize,
    pub coarse: Verdict,
    pub fine: Verdict,
}

impl StepCheck {
    /// The two resolutions disagree on the outcome or by more than `tol`.
    pub fn is_flagged(&self, tol: f64) -> bool {
        self.coarse.label() != self.fine.label() || !(self.max_diff <= tol)
    }
}

/// Integrates with `dt` and `dt/2` and compares the runs at every coarse step.
pub fn halve_step_check(
    model: ModelKind,
    p: &GeneratorParams,
    s0: &SimState,
    cfg: &IntegrationConfig,
) -> Result<StepCheck> {
    let coarse_cfg = IntegrationConfig { record_every: 1, lyapunov: None, ..*cfg };
    let coarse = integrate(model, p, s0, &coarse_cfg)?;
    let fine_cfg = IntegrationConfig { dt: 0.5 * cfg.dt, record_every: 2, ..coarse_cfg };
    let fine = integrate(model, p, s0, &fine_cfg)?;
    let mut max_diff: f64 = 0.0;
    let mut compared = 0;
    let mut j = 0;
    for a in &coarse.samples {
        while j < fine.samples.len() && fine.samples[j].t < a.t {
            j += 1;
        }
        match fine.samples.get(j) {
            Some(b) if b.t == a.t => {
                max_diff = max_diff.max(a.state.max_abs_diff(&b.state));
                compared += 1;
            }
            Some(_) => {}
            None => break,
        }
    }
    if !max_diff.is_finite() {
        max_diff = f64::INFINITY;
    }
    Ok(StepCheck { max_diff, compared, coarse: coarse.verdict, fine: fine.verdict })
}
