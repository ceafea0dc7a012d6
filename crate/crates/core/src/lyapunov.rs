//! Lyapunov, storage and energy functions, region-of-attraction constants and
//! set membership.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};

use crate::equilibria::{equilibria_load, equilibrium_smib};
use crate::error::{Error, Result, SmibCondition};
use crate::params::{GeneratorParams, ModelKind, SimState, OMEGA_GUARD};

const DELTA_MINUS_TOL: f64 = 1e-10;
const DELTA_MINUS_MAX_ITER: usize = 200;

fn guard(omega: f64) -> Result<()> {
    if omega > OMEGA_GUARD {
        Ok(())
    } else {
        Err(Error::SingularState { omega })
    }
}

fn stable_roots(p: &GeneratorParams, u_bar: f64) -> Result<(f64, f64)> {
    equilibria_load(p, u_bar).roots()
}

/// `V(ω) = ½J(ω − ω̄_s)²`.
pub fn v_load(p: &GeneratorParams, omega: f64) -> Result<f64> {
    let (ws, _) = stable_roots(p, 0.0)?;
    Ok(0.5 * p.j() * (omega - ws).powi(2))
}

/// `V̇ = −D_d(ω − ω̄_s)²(1 − ω̄_u/ω)` along the improved load model.
pub fn vdot_load(p: &GeneratorParams, omega: f64) -> Result<f64> {
    guard(omega)?;
    let (ws, wu) = stable_roots(p, 0.0)?;
    Ok(-p.d_d() * (omega - ws).powi(2) * (1.0 - wu / omega))
}

/// Incremental storage `W(ω) = ½J(ω − ω̄_s)² ω*/ω̄_s`.
pub fn w_storage(p: &GeneratorParams, omega: f64, omega_s_bar: f64) -> Result<f64> {
    if !(omega_s_bar.is_finite() && omega_s_bar > 0.0) {
        return Err(Error::NoEquilibrium(format!(
            "storage needs a positive stable speed, got {omega_s_bar}"
        )));
    }
    Ok(0.5 * p.j() * (omega - omega_s_bar).powi(2) * p.omega_star() / omega_s_bar)
}

/// Passivity output `y = (ω − ω*)/ω`.
pub fn passivity_output(p: &GeneratorParams, omega: f64) -> Result<f64> {
    guard(omega)?;
    Ok((omega - p.omega_star()) / omega)
}

/// `Ẇ − (y − ȳ)(u − ū) = −D_d(ω − ω̄_s)²(1 − ω̄_u/ω)(ω*/ω̄_s)` for the reference input `ū`.
pub fn passivity_defect(p: &GeneratorParams, omega: f64, u_bar: f64) -> Result<f64> {
    guard(omega)?;
    let (ws, wu) = stable_roots(p, u_bar)?;
    Ok(-p.d_d() * (omega - ws).powi(2) * (1.0 - wu / omega) * (p.omega_star() / ws))
}

/// `U(ξ, ω) = ½(ξ − ξ̄)² + ½J(ω − ω*)²` with `ξ̄ = P_m − P_e`.
pub fn u_closed_loop(p: &GeneratorParams, s: &SimState) -> Result<f64> {
    let xi = s
        .xi
        .ok_or_else(|| Error::ShapeMismatch("closed-loop energy requires xi".into()))?;
    let xi_bar = p.power_imbalance();
    Ok(0.5 * (xi - xi_bar).powi(2) + 0.5 * p.j() * (s.omega - p.omega_star()).powi(2))
}

/// `U̇ = −D_d(ω − ω*)²`.
pub fn udot_closed_loop(p: &GeneratorParams, s: &SimState) -> f64 {
    -p.d_d() * (s.omega - p.omega_star()).powi(2)
}

/// Normalized oval coordinates; the set is the closed unit disk in them.
pub fn oval_radius_sq(p: &GeneratorParams, s: &SimState) -> Result<f64> {
    let xi = s
        .xi
        .ok_or_else(|| Error::ShapeMismatch("oval membership requires xi".into()))?;
    let w = p.omega_star();
    let a = (s.omega - w) / w;
    let b = (xi - p.power_imbalance()) / (p.j().sqrt() * w);
    Ok(a * a + b * b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmibVariant {
    Improved,
    Conventional,
}

impl SmibVariant {
    pub fn model(self) -> ModelKind {
        match self {
            SmibVariant::Improved => ModelKind::SmibImproved,
            SmibVariant::Conventional => ModelKind::SmibConventional,
        }
    }

    /// Kinetic coefficient: `J` or `M`.
    fn inertia(self, p: &GeneratorParams) -> f64 {
        match self {
            SmibVariant::Improved => p.j(),
            SmibVariant::Conventional => p.m(),
        }
    }

    /// Potential prefactor: `γ/ω*` or `γ`.
    fn potential_scale(self, p: &GeneratorParams, gamma: f64) -> f64 {
        match self {
            SmibVariant::Improved => gamma / p.omega_star(),
            SmibVariant::Conventional => gamma,
        }
    }
}

/// `−cos δ + cos δ̄ − (δ − δ̄) sin δ̄`
fn potential_shape(delta: f64, delta_bar: f64) -> f64 {
    -delta.cos() + delta_bar.cos() - (delta - delta_bar) * delta_bar.sin()
}

/// Angle potential `V_p(δ)`.
pub fn potential_smib(p: &GeneratorParams, delta: f64, variant: SmibVariant) -> Result<f64> {
    let gamma = p.require_gamma()?;
    let eq = equilibrium_smib(p)?;
    Ok(variant.potential_scale(p, gamma) * potential_shape(delta, eq.delta_bar))
}

/// `∂²V_p/∂δ²` at the equilibrium angle, prefactor included.
pub fn potential_curvature(p: &GeneratorParams, variant: SmibVariant) -> Result<f64> {
    let gamma = p.require_gamma()?;
    let eq = equilibrium_smib(p)?;
    Ok(variant.potential_scale(p, gamma) * eq.delta_bar.cos())
}

/// Kinetic plus potential energy around `(δ̄, ω*)`.
pub fn v_smib(p: &GeneratorParams, s: &SimState, variant: SmibVariant) -> Result<f64> {
    let delta = s
        .delta
        .ok_or_else(|| Error::ShapeMismatch("infinite-bus energy requires delta".into()))?;
    let kinetic = 0.5 * variant.inertia(p) * (s.omega - p.omega_star()).powi(2);
    Ok(kinetic + potential_smib(p, delta, variant)?)
}

/// `V̇ = −(ω − ω*)²(D_d − γ(sin δ − sin δ̄)/(ω ω*))` along the improved infinite-bus model.
pub fn vdot_smib_improved(p: &GeneratorParams, s: &SimState) -> Result<f64> {
    let delta = s
        .delta
        .ok_or_else(|| Error::ShapeMismatch("infinite-bus energy requires delta".into()))?;
    guard(s.omega)?;
    let gamma = p.require_gamma()?;
    let eq = equilibrium_smib(p)?;
    let w = p.omega_star();
    let dev = s.omega - w;
    Ok(-dev * dev * (p.d_d() - gamma * (delta.sin() - eq.delta_bar.sin()) / (s.omega * w)))
}

/// `V̇ = −A(ω − ω*)²` along the conventional infinite-bus model.
pub fn vdot_smib_conventional(p: &GeneratorParams, s: &SimState) -> f64 {
    -p.a() * (s.omega - p.omega_star()).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmibConstants {
    /// Kinetic bound; absent for the conventional model.
    pub c_k: Option<f64>,
    pub c_p: f64,
    pub c: f64,
    pub delta_bar: f64,
    pub delta_minus: f64,
}

/// Lower end of the angle interval confined by `V_p(δ) ≤ V_p(π/2)`.
///
/// Bisection on `[−π, δ̄]`, where the potential decreases monotonically toward `δ̄`.
pub fn delta_minus(delta_bar: f64) -> Result<f64> {
    let target = potential_shape(FRAC_PI_2, delta_bar);
    let g = |d: f64| potential_shape(d, delta_bar) - target;
    let (mut lo, mut hi) = (-PI, delta_bar);
    let (g_lo, g_hi) = (g(lo), g(hi));
    if !(g_lo > 0.0 && g_hi < 0.0) {
        return Err(Error::Numerical(format!(
            "no sign change for delta^- on [-pi, {delta_bar}]: g = ({g_lo}, {g_hi})"
        )));
    }
    for _ in 0..DELTA_MINUS_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < DELTA_MINUS_TOL {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_load_angle(p: &GeneratorParams, gamma: f64) -> Result<()> {
    if p.p_m() / gamma < FRAC_2_PI {
        Ok(())
    } else {
        Err(Error::ConditionViolated(SmibCondition::LoadAngle))
    }
}

/// `c_k`, `c_p`, `c = min(c_k, c_p)` and `δ⁻` for the improved infinite-bus model.
pub fn smib_constants(p: &GeneratorParams) -> Result<SmibConstants> {
    let gamma = p.require_gamma()?;
    let w = p.omega_star();
    if !(w > (gamma / p.d_d()).sqrt()) {
        return Err(Error::ConditionViolated(SmibCondition::NominalSpeed));
    }
    check_load_angle(p, gamma)?;
    let eq = equilibrium_smib(p)?;
    let c_k = 0.5 * p.j() * (w - gamma / (p.d_d() * w)).powi(2);
    let c_p = potential_smib(p, FRAC_PI_2, SmibVariant::Improved)?;
    Ok(SmibConstants {
        c_k: Some(c_k),
        c_p,
        c: c_k.min(c_p),
        delta_bar: eq.delta_bar,
        delta_minus: delta_minus(eq.delta_bar)?,
    })
}

/// `c = V_p(π/2)` and `δ⁻` for the conventional infinite-bus model.
pub fn smib_conventional_constants(p: &GeneratorParams) -> Result<SmibConstants> {
    let gamma = p.require_gamma()?;
    check_load_angle(p, gamma)?;
    let eq = equilibrium_smib(p)?;
    let c_p = potential_smib(p, FRAC_PI_2, SmibVariant::Conventional)?;
    Ok(SmibConstants {
        c_k: None,
        c_p,
        c: c_p,
        delta_bar: eq.delta_bar,
        delta_minus: delta_minus(eq.delta_bar)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoaKind {
    OmegaS,
    OmegaK,
    OvalO,
    SmibLevelSet,
    SmibConventionalLevelSet,
}

impl RoaKind {
    /// The set naturally attached to a model, if any.
    pub fn for_model(model: ModelKind) -> Option<RoaKind> {
        match model {
            ModelKind::ImprovedLoad => Some(RoaKind::OmegaS),
            ModelKind::ImprovedClosedLoop => Some(RoaKind::OvalO),
            ModelKind::SmibImproved => Some(RoaKind::SmibLevelSet),
            ModelKind::SmibConventional => Some(RoaKind::SmibConventionalLevelSet),
            ModelKind::ConventionalLoad | ModelKind::ImprovedLoadWithLosses => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RoaConstants {
    Speed { omega_s: f64, omega_u: f64, u_bar: f64 },
    Oval { j: f64, omega_star: f64, xi_bar: f64 },
    Smib(SmibConstants),
}

/// A sublevel set `{V ≤ level}` together with the parameters it was built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoaSet {
    pub kind: RoaKind,
    pub level: f64,
    pub constants: RoaConstants,
    #[serde(skip)]
    params: GeneratorParams,
}

impl RoaSet {
    /// `u_bar` is the constant reference input; only `OmegaK` uses it.
    pub fn build(kind: RoaKind, p: &GeneratorParams, u_bar: f64) -> Result<Self> {
        let (level, constants) = match kind {
            RoaKind::OmegaS => {
                let eq = equilibria_load(p, 0.0);
                let (ws, wu) = eq.roots()?;
                (
                    0.5 * p.j() * eq.discriminant,
                    RoaConstants::Speed { omega_s: ws, omega_u: wu, u_bar: 0.0 },
                )
            }
            RoaKind::OmegaK => {
                let eq = equilibria_load(p, u_bar);
                let (ws, wu) = eq.roots()?;
                if !(ws > 0.0) {
                    return Err(Error::NoEquilibrium(format!("stable speed {ws} is not positive")));
                }
                (
                    0.5 * p.j() * eq.discriminant * p.omega_star() / ws,
                    RoaConstants::Speed { omega_s: ws, omega_u: wu, u_bar },
                )
            }
            RoaKind::OvalO => {
                let w = p.omega_star();
                (
                    0.5 * p.j() * w * w,
                    RoaConstants::Oval { j: p.j(), omega_star: w, xi_bar: p.power_imbalance() },
                )
            }
            RoaKind::SmibLevelSet => {
                let c = smib_constants(p)?;
                (c.c, RoaConstants::Smib(c))
            }
            RoaKind::SmibConventionalLevelSet => {
                let c = smib_conventional_constants(p)?;
                (c.c, RoaConstants::Smib(c))
            }
        };
        Ok(Self { kind, level, constants, params: *p })
    }

    pub fn params(&self) -> &GeneratorParams {
        &self.params
    }

    /// The model whose trajectories this set is an estimate for; for `OmegaK`
    /// the constant input `ū` is folded into `P_m` (see [`RoaSet::model_params`]).
    pub fn model(&self) -> ModelKind {
        match self.kind {
            RoaKind::OmegaS | RoaKind::OmegaK => ModelKind::ImprovedLoad,
            RoaKind::OvalO => ModelKind::ImprovedClosedLoop,
            RoaKind::SmibLevelSet => ModelKind::SmibImproved,
            RoaKind::SmibConventionalLevelSet => ModelKind::SmibConventional,
        }
    }

    pub fn model_params(&self) -> Result<GeneratorParams> {
        match self.constants {
            RoaConstants::Speed { u_bar, .. } if u_bar != 0.0 => {
                self.params.with_powers(self.params.p_m() + u_bar, self.params.p_e())
            }
            _ => Ok(self.params),
        }
    }

    pub fn equilibrium(&self) -> SimState {
        match self.constants {
            RoaConstants::Speed { omega_s, .. } => SimState::load(omega_s),
            RoaConstants::Oval { omega_star, xi_bar, .. } => SimState::closed_loop(xi_bar, omega_star),
            RoaConstants::Smib(c) => SimState::smib(c.delta_bar, self.params.omega_star()),
        }
    }

    fn check_shape(&self, s: &SimState) -> Result<()> {
        self.model().check_shape(s)
    }

    /// The Lyapunov or storage function this set is a sublevel set of.
    pub fn value(&self, s: &SimState) -> Result<f64> {
        self.check_shape(s)?;
        let p = &self.params;
        match (self.kind, self.constants) {
            (RoaKind::OmegaS, RoaConstants::Speed { omega_s, .. }) => {
                Ok(0.5 * p.j() * (s.omega - omega_s).powi(2))
            }
            (RoaKind::OmegaK, RoaConstants::Speed { omega_s, .. }) => w_storage(p, s.omega, omega_s),
            (RoaKind::OvalO, _) => u_closed_loop(p, s),
            (RoaKind::SmibLevelSet, _) => v_smib(p, s, SmibVariant::Improved),
            (RoaKind::SmibConventionalLevelSet, _) => v_smib(p, s, SmibVariant::Conventional),
            _ => unreachable!("constants always match kind"),
        }
    }

    /// Closed-form time derivative of [`RoaSet::value`] along [`RoaSet::model`].
    pub fn rate(&self, s: &SimState) -> Result<f64> {
        self.check_shape(s)?;
        let p = &self.params;
        match (self.kind, self.constants) {
            (RoaKind::OmegaS, _) => vdot_load(p, s.omega),
            (RoaKind::OmegaK, RoaConstants::Speed { u_bar, .. }) => passivity_defect(p, s.omega, u_bar),
            (RoaKind::OvalO, _) => Ok(udot_closed_loop(p, s)),
            (RoaKind::SmibLevelSet, _) => vdot_smib_improved(p, s),
            (RoaKind::SmibConventionalLevelSet, _) => Ok(vdot_smib_conventional(p, s)),
            _ => unreachable!("constants always match kind"),
        }
    }

    /// `V(s) ≤ level` together with the set's domain restriction.
    pub fn contains(&self, s: &SimState) -> Result<bool> {
        let v = self.value(s)?;
        let in_domain = match self.kind {
            RoaKind::OmegaS | RoaKind::OmegaK => s.omega > 0.0,
            RoaKind::OvalO => true,
            RoaKind::SmibLevelSet | RoaKind::SmibConventionalLevelSet => {
                s.delta.is_some_and(|d| (-PI..=PI).contains(&d))
            }
        };
        Ok(in_domain && v <= self.level)
    }

    /// Initial conditions the convergence guarantee excludes: `ω(0) = ω̄_u`
    /// for the speed sets and `(ξ, ω) = (ξ̄, 0)` for the oval.
    pub fn is_exceptional(&self, s: &SimState) -> bool {
        match self.constants {
            RoaConstants::Speed { omega_u, .. } => {
                (s.omega - omega_u).abs() <= 1e-9 * self.params.omega_star()
            }
            RoaConstants::Oval { omega_star, xi_bar, .. } => {
                s.omega.abs() <= 1e-9 * omega_star
                    && s.xi.is_some_and(|x| (x - xi_bar).abs() <= 1e-9 * omega_star)
            }
            RoaConstants::Smib(_) => false,
        }
    }
}
