//! Machine parameters, dynamical state and model selection.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Speeds at or below this value (rad/s) are rejected by every model that divides by ω.
pub const OMEGA_GUARD: f64 = 1e-6;

/// Physical constants of one machine and its operating point.
///
/// Inertia and damping are held as the constant-speed products
/// `M = J·ω*` and `A = D_d·ω*`; `J` and `D_d` are recovered by division, so
/// `m() / omega_star() == j()` holds bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorParams {
    #[serde(rename = "M")]
    m: f64,
    #[serde(rename = "A")]
    a: f64,
    omega_star: f64,
    #[serde(rename = "D_m")]
    d_m: f64,
    #[serde(rename = "P_m")]
    p_m: f64,
    #[serde(rename = "P_e")]
    p_e: f64,
    gamma: Option<f64>,
}

fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParams(msg.into()))
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    require(x.is_finite() && x > 0.0, format!("{name} must be finite and > 0, got {x}"))
}

impl GeneratorParams {
    /// Builds from moment of inertia `J` (kg·m²), damping `D_d` (N·m·s) and nominal speed (rad/s).
    pub fn from_inertia(j: f64, d_d: f64, omega_star: f64) -> Result<Self> {
        positive("J", j)?;
        positive("D_d", d_d)?;
        positive("omega_star", omega_star)?;
        Self::from_momentum(j * omega_star, d_d * omega_star, omega_star)
    }

    /// Builds from angular momentum `M` and constant-speed damping `A`.
    pub fn from_momentum(m: f64, a: f64, omega_star: f64) -> Result<Self> {
        positive("M", m)?;
        positive("A", a)?;
        positive("omega_star", omega_star)?;
        Ok(Self {
            m,
            a,
            omega_star,
            d_m: 0.0,
            p_m: 0.0,
            p_e: 0.0,
            gamma: None,
        })
    }

    pub fn with_powers(mut self, p_m: f64, p_e: f64) -> Result<Self> {
        require(p_m.is_finite() && p_e.is_finite(), "P_m and P_e must be finite")?;
        self.p_m = p_m;
        self.p_e = p_e;
        Ok(self)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        positive("gamma", gamma)?;
        self.gamma = Some(gamma);
        Ok(self)
    }

    pub fn with_mech_losses(mut self, d_m: f64) -> Result<Self> {
        require(d_m.is_finite() && d_m >= 0.0, format!("D_m must be finite and >= 0, got {d_m}"))?;
        self.d_m = d_m;
        Ok(self)
    }

    /// Replaces the nominal speed while keeping `J` and `D_d` fixed.
    pub(crate) fn with_nominal_speed(self, omega_star: f64, d_d: f64) -> Result<Self> {
        let j = self.j();
        let mut out = Self::from_inertia(j, d_d, omega_star)?;
        out.p_m = self.p_m;
        out.p_e = self.p_e;
        out.gamma = self.gamma;
        Ok(out)
    }

    pub fn j(&self) -> f64 {
        self.m / self.omega_star
    }

    pub fn d_d(&self) -> f64 {
        self.a / self.omega_star
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn omega_star(&self) -> f64 {
        self.omega_star
    }

    pub fn d_m(&self) -> f64 {
        self.d_m
    }

    pub fn p_m(&self) -> f64 {
        self.p_m
    }

    pub fn p_e(&self) -> f64 {
        self.p_e
    }

    /// Net power imbalance `P_m − P_e`.
    pub fn power_imbalance(&self) -> f64 {
        self.p_m - self.p_e
    }

    pub fn gamma(&self) -> Option<f64> {
        self.gamma
    }

    pub fn require_gamma(&self) -> Result<f64> {
        self.gamma
            .ok_or_else(|| Error::InvalidParams("gamma is required for infinite-bus models".into()))
    }
}

/// Dynamical state. `delta` is present only for infinite-bus models and `xi`
/// only for the closed loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub omega: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
}

impl SimState {
    pub fn load(omega: f64) -> Self {
        Self { omega, delta: None, xi: None }
    }

    pub fn smib(delta: f64, omega: f64) -> Self {
        Self { omega, delta: Some(delta), xi: None }
    }

    pub fn closed_loop(xi: f64, omega: f64) -> Self {
        Self { omega, delta: None, xi: Some(xi) }
    }

    pub fn frequency_hz(&self) -> f64 {
        omega_to_hz(self.omega)
    }

    /// `self + h·d`, component-wise over the components present in both.
    pub fn advanced(&self, h: f64, d: &Derivative) -> Self {
        Self {
            omega: self.omega + h * d.omega,
            delta: self.delta.map(|x| x + h * d.delta.unwrap_or(0.0)),
            xi: self.xi.map(|x| x + h * d.xi.unwrap_or(0.0)),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.omega.is_finite()
            && self.delta.is_none_or(f64::is_finite)
            && self.xi.is_none_or(f64::is_finite)
    }

    /// Largest absolute component difference; components absent in either side are ignored.
    pub fn max_abs_diff(&self, other: &SimState) -> f64 {
        let mut d = (self.omega - other.omega).abs();
        if let (Some(a), Some(b)) = (self.delta, other.delta) {
            d = d.max((a - b).abs());
        }
        if let (Some(a), Some(b)) = (self.xi, other.xi) {
            d = d.max((a - b).abs());
        }
        d
    }
}

/// Time derivative of a [`SimState`], with the same shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Derivative {
    pub omega: f64,
    pub delta: Option<f64>,
    pub xi: Option<f64>,
}

impl Derivative {
    pub fn norm(&self) -> f64 {
        let sq = self.omega * self.omega
            + self.delta.map_or(0.0, |x| x * x)
            + self.xi.map_or(0.0, |x| x * x);
        sq.sqrt()
    }

    pub(crate) fn combine_rk4(k1: &Self, k2: &Self, k3: &Self, k4: &Self) -> Self {
        let mix = |a: f64, b: f64, c: f64, d: f64| (a + 2.0 * b + 2.0 * c + d) / 6.0;
        let opt = |a: Option<f64>, b: Option<f64>, c: Option<f64>, d: Option<f64>| {
            a.map(|a| mix(a, b.unwrap_or(0.0), c.unwrap_or(0.0), d.unwrap_or(0.0)))
        };
        Self {
            omega: mix(k1.omega, k2.omega, k3.omega, k4.omega),
            delta: opt(k1.delta, k2.delta, k3.delta, k4.delta),
            xi: opt(k1.xi, k2.xi, k3.xi, k4.xi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    ConventionalLoad,
    ImprovedLoad,
    ImprovedLoadWithLosses,
    ImprovedClosedLoop,
    SmibImproved,
    SmibConventional,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::ConventionalLoad,
        ModelKind::ImprovedLoad,
        ModelKind::ImprovedLoadWithLosses,
        ModelKind::ImprovedClosedLoop,
        ModelKind::SmibImproved,
        ModelKind::SmibConventional,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::ConventionalLoad => "conventional_load",
            ModelKind::ImprovedLoad => "improved_load",
            ModelKind::ImprovedLoadWithLosses => "improved_load_with_losses",
            ModelKind::ImprovedClosedLoop => "improved_closed_loop",
            ModelKind::SmibImproved => "smib_improved",
            ModelKind::SmibConventional => "smib_conventional",
        }
    }

    pub fn has_delta(&self) -> bool {
        matches!(self, ModelKind::SmibImproved | ModelKind::SmibConventional)
    }

    pub fn has_xi(&self) -> bool {
        matches!(self, ModelKind::ImprovedClosedLoop)
    }

    /// Whether the right-hand side divides by ω.
    pub fn is_improved(&self) -> bool {
        !matches!(self, ModelKind::ConventionalLoad | ModelKind::SmibConventional)
    }

    pub fn check_shape(&self, s: &SimState) -> Result<()> {
        if s.delta.is_some() != self.has_delta() || s.xi.is_some() != self.has_xi() {
            return Err(Error::ShapeMismatch(format!(
                "model {} expects delta {} and xi {}",
                self.name(),
                if self.has_delta() { "present" } else { "absent" },
                if self.has_xi() { "present" } else { "absent" },
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown model kind `{s}`")))
    }
}

pub fn hz_to_omega(f: f64) -> f64 {
    2.0 * PI * f
}

pub fn omega_to_hz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities_are_exact() {
        let w = 2.0 * PI * 60.0;
        let p = GeneratorParams::from_momentum(0.2, 0.04, w).unwrap();
        assert_eq!(p.m() / p.omega_star(), p.j());
        assert_eq!(p.a() / p.omega_star(), p.d_d());
        assert_eq!(p.m(), 0.2);
        assert_eq!(p.a(), 0.04);
        assert_eq!(p.d_m(), 0.0);
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(GeneratorParams::from_inertia(0.0, 1.0, 1.0).is_err());
        assert!(GeneratorParams::from_inertia(1.0, -1.0, 1.0).is_err());
        assert!(GeneratorParams::from_inertia(1.0, 1.0, f64::NAN).is_err());
        let p = GeneratorParams::from_inertia(1.0, 1.0, 1.0).unwrap();
        assert!(p.with_gamma(0.0).is_err());
        assert!(p.with_mech_losses(-1e-3).is_err());
        assert!(p.with_mech_losses(0.0).is_ok());
    }

    #[test]
    fn shape_checks() {
        assert!(ModelKind::SmibImproved.check_shape(&SimState::load(1.0)).is_err());
        assert!(ModelKind::ImprovedLoad.check_shape(&SimState::load(1.0)).is_ok());
        assert!(ModelKind::ImprovedClosedLoop
            .check_shape(&SimState::closed_loop(0.0, 1.0))
            .is_ok());
        assert!(ModelKind::ImprovedLoad
            .check_shape(&SimState::smib(0.0, 1.0))
            .is_err());
    }

    #[test]
    fn model_names_round_trip() {
        for k in ModelKind::ALL {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
    }
}
