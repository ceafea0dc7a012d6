//! Right-hand sides of the six swing models and the torque/power bridge.
//!
//! Improved models are evaluated with `Jω = M·(ω/ω*)` and `D_dω = A·(ω/ω*)`.
//! At `ω = ω*` the ratio is exactly one, so every improved model agrees bit
//! for bit with its conventional counterpart at nominal speed.

use crate::error::{Error, Result};
use crate::params::{Derivative, GeneratorParams, ModelKind, SimState, OMEGA_GUARD};

fn guard(omega: f64) -> Result<()> {
    if omega > OMEGA_GUARD {
        Ok(())
    } else {
        Err(Error::SingularState { omega })
    }
}

fn need_delta(s: &SimState) -> Result<f64> {
    s.delta
        .ok_or_else(|| Error::ShapeMismatch("infinite-bus model requires delta".into()))
}

fn need_xi(s: &SimState) -> Result<f64> {
    s.xi
        .ok_or_else(|| Error::ShapeMismatch("closed-loop model requires xi".into()))
}

/// `(net_power − D_d ω (ω − ω*)) / (J ω)`, the common core of every improved model.
fn improved_accel(p: &GeneratorParams, omega: f64, net_power: f64) -> f64 {
    let r = omega / p.omega_star();
    (net_power - p.a() * r * (omega - p.omega_star())) / (p.m() * r)
}

/// `M ω̇ + A(ω − ω*) = P_m − P_e`.
pub fn rhs_conventional_load(p: &GeneratorParams, s: &SimState) -> f64 {
    (p.power_imbalance() - p.a() * (s.omega - p.omega_star())) / p.m()
}

/// `J ω ω̇ + D_d ω (ω − ω*) = P_m − P_e`.
pub fn rhs_improved_load(p: &GeneratorParams, s: &SimState) -> Result<f64> {
    guard(s.omega)?;
    Ok(improved_accel(p, s.omega, p.power_imbalance()))
}

/// Improved model with the viscous loss term `D_m ω²`.
pub fn rhs_improved_losses(p: &GeneratorParams, s: &SimState) -> Result<f64> {
    guard(s.omega)?;
    let w = s.omega;
    Ok(improved_accel(p, w, p.power_imbalance() - p.d_m() * w * w))
}

/// Improved model under the integral controller `u = −ξ`, `ξ̇ = (ω − ω*)/ω`.
/// Returns `(ω̇, ξ̇)`.
pub fn rhs_closed_loop(p: &GeneratorParams, s: &SimState) -> Result<(f64, f64)> {
    let xi = need_xi(s)?;
    guard(s.omega)?;
    let w = s.omega;
    let d_omega = improved_accel(p, w, -xi + p.power_imbalance());
    let d_xi = (w - p.omega_star()) / w;
    Ok((d_omega, d_xi))
}

/// Improved machine on an infinite bus. Returns `(δ̇, ω̇)`.
pub fn rhs_smib_improved(p: &GeneratorParams, s: &SimState) -> Result<(f64, f64)> {
    let delta = need_delta(s)?;
    let gamma = p.require_gamma()?;
    guard(s.omega)?;
    let w = s.omega;
    Ok((w - p.omega_star(), improved_accel(p, w, p.p_m() - gamma * delta.sin())))
}

/// Conventional swing equation on an infinite bus. Returns `(δ̇, ω̇)`.
pub fn rhs_smib_conventional(p: &GeneratorParams, s: &SimState) -> Result<(f64, f64)> {
    let delta = need_delta(s)?;
    let gamma = p.require_gamma()?;
    let dev = s.omega - p.omega_star();
    Ok((dev, (p.p_m() - gamma * delta.sin() - p.a() * dev) / p.m()))
}

impl ModelKind {
    /// Evaluates this model's vector field, checking the state shape first.
    pub fn rhs(&self, p: &GeneratorParams, s: &SimState) -> Result<Derivative> {
        self.check_shape(s)?;
        let load = |omega| Derivative { omega, delta: None, xi: None };
        Ok(match self {
            ModelKind::ConventionalLoad => load(rhs_conventional_load(p, s)),
            ModelKind::ImprovedLoad => load(rhs_improved_load(p, s)?),
            ModelKind::ImprovedLoadWithLosses => load(rhs_improved_losses(p, s)?),
            ModelKind::ImprovedClosedLoop => {
                let (omega, xi) = rhs_closed_loop(p, s)?;
                Derivative { omega, delta: None, xi: Some(xi) }
            }
            ModelKind::SmibImproved => {
                let (delta, omega) = rhs_smib_improved(p, s)?;
                Derivative { omega, delta: Some(delta), xi: None }
            }
            ModelKind::SmibConventional => {
                let (delta, omega) = rhs_smib_conventional(p, s)?;
                Derivative { omega, delta: Some(delta), xi: None }
            }
        })
    }
}

/// `τ = P / ω`.
pub fn power_to_torque(power: f64, omega: f64) -> Result<f64> {
    guard(omega)?;
    Ok(power / omega)
}

/// `P = τ ω`.
pub fn torque_to_power(torque: f64, omega: f64) -> Result<f64> {
    guard(omega)?;
    Ok(torque * omega)
}
