//! Scenario documents, the built-in presets and the scenario runner.
//!
//! A scenario is a JSON object with the top-level keys `scenario`, `params`,
//! `initial`, `integration`, `outputs`, `level_set` and `tolerance`. When
//! `scenario.preset` names a built-in preset, the document is laid over that
//! preset field by field. See `docs/config.md` for the full schema.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

use crate::equilibria::{equilibria_load, equilibrium_smib};
use crate::error::{Error, Result};
use crate::integrator::{IntegrationConfig, Trajectory};
use crate::levelset::{level_set_sample, LevelSetSample};
use crate::lyapunov::{smib_constants, RoaKind, RoaSet};
use crate::params::{hz_to_omega, GeneratorParams, ModelKind, SimState};
use crate::sweep::{basin_sweep, integrate_many, BasinReport, BasinTolerance, Grid, GridAxis};

pub const PRESETS: [&str; 5] = ["example1", "example2", "example3", "smib-compare", "smib-roa"];

/// Nominal speed shared by every preset, rad/s.
pub const PRESET_OMEGA_STAR: f64 = 2.0 * PI * 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputKind {
    Trajectory,
    VerdictGrid,
    LevelSet,
    Constants,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<String>,
    preset: Option<String>,
    models: Option<Vec<ModelKind>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    #[serde(rename = "J")]
    j: Option<f64>,
    #[serde(rename = "D_d")]
    d_d: Option<f64>,
    #[serde(rename = "M")]
    m: Option<f64>,
    #[serde(rename = "A")]
    a: Option<f64>,
    omega_star: Option<f64>,
    f_nominal_hz: Option<f64>,
    #[serde(rename = "P_m")]
    p_m: Option<f64>,
    #[serde(rename = "P_e")]
    p_e: Option<f64>,
    gamma: Option<f64>,
    #[serde(rename = "D_m")]
    d_m: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    omega: Option<f64>,
    f_hz: Option<f64>,
    delta: Option<f64>,
    xi: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    omega: Option<GridAxis>,
    f_hz: Option<GridAxis>,
    delta: Option<GridAxis>,
    xi: Option<GridAxis>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    states: Option<Vec<RawState>>,
    grid: Option<RawGrid>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegration {
    dt: Option<f64>,
    t_max: Option<f64>,
    conv_tol: Option<f64>,
    div_bound: Option<f64>,
    angle_bound: Option<f64>,
    lyapunov: Option<RoaKind>,
    record_every: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLevelSet {
    kind: Option<RoaKind>,
    resolution: Option<usize>,
    u_bar: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    scenario: Option<RawScenario>,
    params: Option<RawParams>,
    initial: Option<RawInitial>,
    integration: Option<RawIntegration>,
    outputs: Option<Vec<OutputKind>>,
    level_set: Option<RawLevelSet>,
    tolerance: Option<BasinTolerance>,
}

fn pick<T>(over: Option<T>, base: Option<T>) -> Option<T> {
    over.or(base)
}

impl RawParams {
    fn overlay(self, o: RawParams) -> RawParams {
        let inertia_given = o.j.is_some() || o.d_d.is_some();
        let momentum_given = o.m.is_some() || o.a.is_some();
        let speed_given = o.omega_star.is_some() || o.f_nominal_hz.is_some();
        let keep = |given: bool, b: Option<f64>| if given { None } else { b };
        RawParams {
            j: pick(o.j, keep(momentum_given, self.j)),
            d_d: pick(o.d_d, keep(momentum_given, self.d_d)),
            m: pick(o.m, keep(inertia_given, self.m)),
            a: pick(o.a, keep(inertia_given, self.a)),
            omega_star: pick(o.omega_star, keep(speed_given, self.omega_star)),
            f_nominal_hz: pick(o.f_nominal_hz, keep(speed_given, self.f_nominal_hz)),
            p_m: pick(o.p_m, self.p_m),
            p_e: pick(o.p_e, self.p_e),
            gamma: pick(o.gamma, self.gamma),
            d_m: pick(o.d_m, self.d_m),
        }
    }

    fn resolve(&self) -> Result<GeneratorParams> {
        let cfg = |m: &str| Error::InvalidConfig(format!("params: {m}"));
        let omega_star = match (self.omega_star, self.f_nominal_hz) {
            (Some(w), None) => w,
            (None, Some(f)) => hz_to_omega(f),
            (Some(_), Some(_)) => return Err(cfg("give omega_star or f_nominal_hz, not both")),
            (None, None) => return Err(cfg("omega_star (or f_nominal_hz) is required")),
        };
        let base = match (self.j, self.d_d, self.m, self.a) {
            (Some(j), Some(d), None, None) => GeneratorParams::from_inertia(j, d, omega_star),
            (None, None, Some(m), Some(a)) => GeneratorParams::from_momentum(m, a, omega_star),
            _ => return Err(cfg("give either J and D_d, or M and A")),
        }?;
        let mut p = base
            .with_powers(self.p_m.unwrap_or(0.0), self.p_e.unwrap_or(0.0))?
            .with_mech_losses(self.d_m.unwrap_or(0.0))?;
        if let Some(g) = self.gamma {
            p = p.with_gamma(g)?;
        }
        Ok(p)
    }
}

impl RawIntegration {
    fn overlay(self, o: RawIntegration) -> RawIntegration {
        RawIntegration {
            dt: pick(o.dt, self.dt),
            t_max: pick(o.t_max, self.t_max),
            conv_tol: pick(o.conv_tol, self.conv_tol),
            div_bound: pick(o.div_bound, self.div_bound),
            angle_bound: pick(o.angle_bound, self.angle_bound),
            lyapunov: pick(o.lyapunov, self.lyapunov),
            record_every: pick(o.record_every, self.record_every),
        }
    }

    fn resolve(&self, p: &GeneratorParams) -> Result<IntegrationConfig> {
        let d = IntegrationConfig::default_for(p);
        let cfg = IntegrationConfig {
            dt: self.dt.unwrap_or(d.dt),
            t_max: self.t_max.unwrap_or(d.t_max),
            conv_tol: self.conv_tol.unwrap_or(d.conv_tol),
            div_bound: self.div_bound.unwrap_or(d.div_bound),
            angle_bound: self.angle_bound,
            lyapunov: self.lyapunov,
            record_every: self.record_every.unwrap_or(d.record_every),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RawState {
    fn resolve(&self) -> Result<SimState> {
        let omega = match (self.omega, self.f_hz) {
            (Some(w), None) => w,
            (None, Some(f)) => hz_to_omega(f),
            _ => {
                return Err(Error::InvalidConfig(
                    "initial state needs exactly one of omega or f_hz".into(),
                ))
            }
        };
        Ok(SimState { omega, delta: self.delta, xi: self.xi })
    }
}

impl RawGrid {
    fn resolve(&self) -> Result<Grid> {
        let omega = match (self.omega, self.f_hz) {
            (Some(a), None) => a,
            (None, Some(a)) => GridAxis { min: hz_to_omega(a.min), max: hz_to_omega(a.max), n: a.n },
            _ => return Err(Error::InvalidConfig("grid needs exactly one of omega or f_hz".into())),
        };
        Ok(Grid { omega, delta: self.delta, xi: self.xi })
    }
}

impl RawSpec {
    fn overlay(self, o: RawSpec) -> RawSpec {
        let scenario = match (self.scenario, o.scenario) {
            (Some(b), Some(s)) => Some(RawScenario {
                name: pick(s.name, b.name),
                preset: pick(s.preset, b.preset),
                models: pick(s.models, b.models),
            }),
            (b, s) => s.or(b),
        };
        let params = match (self.params, o.params) {
            (Some(b), Some(s)) => Some(b.overlay(s)),
            (b, s) => s.or(b),
        };
        let integration = match (self.integration, o.integration) {
            (Some(b), Some(s)) => Some(b.overlay(s)),
            (b, s) => s.or(b),
        };
        let level_set = match (self.level_set, o.level_set) {
            (Some(b), Some(s)) => Some(RawLevelSet {
                kind: pick(s.kind, b.kind),
                resolution: pick(s.resolution, b.resolution),
                u_bar: pick(s.u_bar, b.u_bar),
            }),
            (b, s) => s.or(b),
        };
        RawSpec {
            scenario,
            params,
            initial: pick(o.initial, self.initial),
            integration,
            outputs: pick(o.outputs, self.outputs),
            level_set,
            tolerance: pick(o.tolerance, self.tolerance),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Initial {
    None,
    States(Vec<SimState>),
    Grid(Grid),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelSetRequest {
    pub kind: Option<RoaKind>,
    pub resolution: usize,
    pub u_bar: f64,
}

/// A fully resolved, validated scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub models: Vec<ModelKind>,
    pub params: GeneratorParams,
    pub initial: Initial,
    pub integration: IntegrationConfig,
    pub outputs: Vec<OutputKind>,
    pub level_set: LevelSetRequest,
    pub tolerance: BasinTolerance,
}

fn paper_params(p_m: f64, p_e: Option<f64>) -> RawParams {
    RawParams {
        m: Some(0.2),
        a: Some(0.04),
        omega_star: Some(PRESET_OMEGA_STAR),
        p_m: Some(p_m),
        p_e,
        gamma: Some(2.0),
        ..RawParams::default()
    }
}

fn preset_raw(name: &str) -> Result<RawSpec> {
    let scenario = |models: Vec<ModelKind>| {
        Some(RawScenario { name: Some(name.to_string()), preset: None, models: Some(models) })
    };
    let load_pair = vec![ModelKind::ConventionalLoad, ModelKind::ImprovedLoad];
    let smib_pair = vec![ModelKind::SmibConventional, ModelKind::SmibImproved];
    let start = |f: f64| {
        Some(RawInitial {
            states: Some(vec![RawState { f_hz: Some(f), ..RawState::default() }]),
            grid: None,
        })
    };
    let load_integration = Some(RawIntegration {
        dt: Some(1e-4),
        t_max: Some(300.0),
        ..RawIntegration::default()
    });
    let raw = match name {
        "example1" => RawSpec {
            scenario: scenario(load_pair),
            params: Some(paper_params(1.0, Some(2.0))),
            initial: start(60.0),
            integration: load_integration,
            outputs: Some(vec![OutputKind::Trajectory, OutputKind::Constants]),
            ..RawSpec::default()
        },
        "example2" => RawSpec {
            scenario: scenario(load_pair),
            params: Some(paper_params(1.0, Some(4.65))),
            initial: start(24.0),
            integration: load_integration,
            outputs: Some(vec![OutputKind::Trajectory, OutputKind::Constants]),
            ..RawSpec::default()
        },
        "example3" => RawSpec {
            scenario: scenario(load_pair),
            params: Some(paper_params(1.0, Some(4.90))),
            initial: start(60.0),
            integration: load_integration,
            outputs: Some(vec![OutputKind::Trajectory, OutputKind::Constants]),
            ..RawSpec::default()
        },
        "smib-compare" => RawSpec {
            scenario: scenario(smib_pair),
            params: Some(paper_params(1.0, None)),
            initial: None,
            integration: load_integration,
            outputs: Some(vec![OutputKind::Trajectory, OutputKind::Constants]),
            ..RawSpec::default()
        },
        "smib-roa" => RawSpec {
            scenario: scenario(vec![ModelKind::SmibImproved]),
            params: Some(paper_params(1.0, None)),
            initial: Some(RawInitial {
                states: None,
                grid: Some(RawGrid {
                    f_hz: Some(GridAxis { min: 55.0, max: 65.0, n: 50 }),
                    delta: Some(GridAxis { min: -PI, max: PI, n: 50 }),
                    ..RawGrid::default()
                }),
            }),
            integration: Some(RawIntegration {
                dt: Some(1e-3),
                t_max: Some(300.0),
                angle_bound: Some(2.0 * PI),
                ..RawIntegration::default()
            }),
            outputs: Some(vec![OutputKind::VerdictGrid, OutputKind::LevelSet, OutputKind::Constants]),
            level_set: Some(RawLevelSet {
                kind: Some(RoaKind::SmibLevelSet),
                resolution: Some(256),
                u_bar: None,
            }),
            ..RawSpec::default()
        },
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown preset `{other}`; available: {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(raw)
}

impl ScenarioSpec {
    pub fn preset(name: &str) -> Result<Self> {
        Self::resolve(preset_raw(name)?)
    }

    /// Parses a scenario document; `origin` labels diagnostics.
    pub fn from_json_str(text: &str, origin: &str) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("{origin}: {e}")))?;
        let raw = match raw.scenario.as_ref().and_then(|s| s.preset.clone()) {
            Some(name) => preset_raw(&name)?.overlay(raw),
            None => raw,
        };
        Self::resolve(raw).map_err(|e| match e {
            Error::InvalidConfig(m) => Error::InvalidConfig(format!("{origin}: {m}")),
            Error::InvalidParams(m) => Error::InvalidConfig(format!("{origin}: params: {m}")),
            other => other,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text, &path.display().to_string())
    }

    fn resolve(raw: RawSpec) -> Result<Self> {
        let missing = |k: &str| Error::InvalidConfig(format!("missing required key `{k}`"));
        let scenario = raw.scenario.ok_or_else(|| missing("scenario"))?;
        let name = scenario
            .name
            .or(scenario.preset)
            .ok_or_else(|| missing("scenario.name"))?;
        if name.is_empty() || name.contains(['/', '\\']) {
            return Err(Error::InvalidConfig(format!("scenario.name `{name}` is not a plain file stem")));
        }
        let models = scenario.models.ok_or_else(|| missing("scenario.models"))?;
        if models.is_empty() {
            return Err(Error::InvalidConfig("scenario.models must not be empty".into()));
        }
        let params = raw.params.ok_or_else(|| missing("params"))?.resolve()?;
        let integration = raw.integration.unwrap_or_default().resolve(&params)?;

        let initial = match raw.initial {
            None => Initial::None,
            Some(RawInitial { states: Some(_), grid: Some(_) }) => {
                return Err(Error::InvalidConfig("initial: give states or grid, not both".into()))
            }
            Some(RawInitial { states: Some(states), grid: None }) => {
                let states = states.iter().map(RawState::resolve).collect::<Result<Vec<_>>>()?;
                if states.is_empty() {
                    return Err(Error::InvalidConfig("initial.states must not be empty".into()));
                }
                Initial::States(states)
            }
            Some(RawInitial { states: None, grid: Some(g) }) => {
                let grid = g.resolve()?;
                grid.states()?;
                Initial::Grid(grid)
            }
            Some(RawInitial { states: None, grid: None }) => Initial::None,
        };
        let shape_probe: Vec<SimState> = match &initial {
            Initial::States(s) => s.clone(),
            Initial::Grid(g) => g.states()?.into_iter().take(1).collect(),
            Initial::None => Vec::new(),
        };
        for m in &models {
            for s in &shape_probe {
                m.check_shape(s).map_err(|e| Error::InvalidConfig(format!("initial: {e}")))?;
            }
        }
        if models.iter().any(ModelKind::has_delta) && params.gamma().is_none() {
            return Err(Error::InvalidConfig("params.gamma is required for infinite-bus models".into()));
        }

        let ls = raw.level_set.unwrap_or_default();
        Ok(Self {
            name,
            models,
            params,
            initial,
            integration,
            outputs: raw.outputs.unwrap_or_else(|| vec![OutputKind::Trajectory]),
            level_set: LevelSetRequest {
                kind: ls.kind,
                resolution: ls.resolution.unwrap_or(256),
                u_bar: ls.u_bar.unwrap_or(0.0),
            },
            tolerance: raw.tolerance.unwrap_or_default(),
        })
    }

    pub fn wants(&self, o: OutputKind) -> bool {
        self.outputs.contains(&o)
    }

    pub fn level_set_kind(&self) -> Result<RoaKind> {
        self.level_set
            .kind
            .or_else(|| self.models.iter().find_map(|m| RoaKind::for_model(*m)))
            .ok_or_else(|| Error::InvalidConfig("level_set.kind is required for these models".into()))
    }
}

/// Closed-form quantities for one parameter set. Entries that do not apply
/// (no equilibrium, no coupling, violated conditions) are `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsReport {
    #[serde(rename = "Delta")]
    pub discriminant: f64,
    pub exists: bool,
    pub omega_s: Option<f64>,
    pub omega_u: Option<f64>,
    pub c_k: Option<f64>,
    pub c_p: Option<f64>,
    pub c: Option<f64>,
    pub delta_minus: Option<f64>,
    pub delta_bar: Option<f64>,
    pub notes: Vec<String>,
}

pub fn constants_report(p: &GeneratorParams) -> ConstantsReport {
    let eq = equilibria_load(p, 0.0);
    let mut r = ConstantsReport {
        discriminant: eq.discriminant,
        exists: eq.exists,
        omega_s: eq.omega_s,
        omega_u: eq.omega_u,
        c_k: None,
        c_p: None,
        c: None,
        delta_minus: None,
        delta_bar: None,
        notes: Vec::new(),
    };
    if !eq.exists {
        r.notes.push("no constant-load equilibrium: Delta <= 0".into());
    }
    if p.gamma().is_some() {
        match equilibrium_smib(p) {
            Ok(e) => r.delta_bar = Some(e.delta_bar),
            Err(e) => r.notes.push(e.to_string()),
        }
        match smib_constants(p) {
            Ok(c) => {
                r.c_k = c.c_k;
                r.c_p = Some(c.c_p);
                r.c = Some(c.c);
                r.delta_minus = Some(c.delta_minus);
            }
            Err(e) => r.notes.push(e.to_string()),
        }
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Sweep,
    LevelSet,
    Constants,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRun {
    pub model: ModelKind,
    pub index: usize,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioResult {
    pub trajectories: Vec<TrajectoryRun>,
    pub basins: Vec<BasinReport>,
    pub level_set: Option<(RoaKind, LevelSetSample)>,
    pub constants: Option<ConstantsReport>,
}

impl ScenarioResult {
    pub fn basin_violations(&self) -> usize {
        self.basins.iter().map(|b| b.violations().len()).sum()
    }
}

fn instrumented(model: ModelKind, p: &GeneratorParams, cfg: &IntegrationConfig) -> IntegrationConfig {
    let lyapunov = cfg.lyapunov.or_else(|| {
        RoaKind::for_model(model).filter(|k| RoaSet::build(*k, p, 0.0).is_ok())
    });
    IntegrationConfig { lyapunov, ..*cfg }
}

fn basins(spec: &ScenarioSpec, grid: &Grid) -> Result<Vec<BasinReport>> {
    spec.models
        .iter()
        .map(|&model| {
            let set = RoaKind::for_model(model).and_then(|k| RoaSet::build(k, &spec.params, 0.0).ok());
            basin_sweep(model, &spec.params, grid, set.as_ref(), &spec.integration, &spec.tolerance)
        })
        .collect()
}

fn level_set(spec: &ScenarioSpec) -> Result<(RoaKind, LevelSetSample)> {
    let kind = spec.level_set_kind()?;
    let set = RoaSet::build(kind, &spec.params, spec.level_set.u_bar)?;
    Ok((kind, level_set_sample(&set, spec.level_set.resolution)?))
}

/// Executes `command` for `spec`.
pub fn run_scenario(spec: &ScenarioSpec, command: Command) -> Result<ScenarioResult> {
    let mut out = ScenarioResult::default();
    match command {
        Command::Constants => out.constants = Some(constants_report(&spec.params)),
        Command::LevelSet => out.level_set = Some(level_set(spec)?),
        Command::Sweep => {
            let Initial::Grid(grid) = &spec.initial else {
                return Err(Error::InvalidConfig("sweep needs initial.grid".into()));
            };
            out.basins = basins(spec, grid)?;
            if spec.wants(OutputKind::Constants) {
                out.constants = Some(constants_report(&spec.params));
            }
        }
        Command::Run => {
            match &spec.initial {
                Initial::None => {
                    return Err(Error::InvalidConfig(format!(
                        "scenario `{}` needs initial.states or initial.grid",
                        spec.name
                    )))
                }
                Initial::States(states) => {
                    for &model in &spec.models {
                        let cfg = instrumented(model, &spec.params, &spec.integration);
                        for (index, tr) in integrate_many(model, &spec.params, states, &cfg).into_iter().enumerate() {
                            out.trajectories.push(TrajectoryRun { model, index, trajectory: tr? });
                        }
                    }
                }
                Initial::Grid(grid) => out.basins = basins(spec, grid)?,
            }
            if spec.wants(OutputKind::LevelSet) {
                out.level_set = Some(level_set(spec)?);
            }
            if spec.wants(OutputKind::Constants) {
                out.constants = Some(constants_report(&spec.params));
            }
        }
    }
    Ok(out)
}
