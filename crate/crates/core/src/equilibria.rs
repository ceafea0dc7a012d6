//! Closed-form equilibria of the constant-load and infinite-bus models.

use serde::Serialize;
use std::f64::consts::FRAC_2_PI;

use crate::error::{Error, Result};
use crate::params::GeneratorParams;

/// Roots of `D_d ω (ω − ω*) = ū + P_m − P_e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumPair {
    pub discriminant: f64,
    pub omega_s: Option<f64>,
    pub omega_u: Option<f64>,
    pub exists: bool,
}

impl EquilibriumPair {
    /// `(ω̄_s, ω̄_u)`, or `NoEquilibrium` when the discriminant is not positive.
    pub fn roots(&self) -> Result<(f64, f64)> {
        match (self.omega_s, self.omega_u) {
            (Some(s), Some(u)) if self.exists => Ok((s, u)),
            _ => Err(Error::NoEquilibrium(format!(
                "discriminant {} is not positive",
                self.discriminant
            ))),
        }
    }
}

/// `Δ = ω*² + 4(ū + P_m − P_e)/D_d`.
pub fn discriminant(p: &GeneratorParams, u_bar: f64) -> f64 {
    let w = p.omega_star();
    w * w + 4.0 * (u_bar + p.power_imbalance()) / p.d_d()
}

/// Stable and unstable speed equilibria of the (possibly input-shifted) improved load model.
/// `Δ = 0` is reported as non-existent.
pub fn equilibria_load(p: &GeneratorParams, u_bar: f64) -> EquilibriumPair {
    let disc = discriminant(p, u_bar);
    if !(disc > 0.0) {
        return EquilibriumPair { discriminant: disc, omega_s: None, omega_u: None, exists: false };
    }
    let omega_s = 0.5 * (p.omega_star() + disc.sqrt());
    // Vieta form avoids cancellation in (ω* − √Δ)/2 when the imbalance is small.
    let omega_u = -(u_bar + p.power_imbalance()) / (p.d_d() * omega_s) + 0.0;
    EquilibriumPair { discriminant: disc, omega_s: Some(omega_s), omega_u: Some(omega_u), exists: true }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmibEquilibrium {
    pub delta_bar: f64,
    pub omega: f64,
    /// `0 < δ̄` and `P_m/γ < 2/π`: the analytic region-of-attraction estimate applies.
    pub roa_eligible: bool,
}

/// `(arcsin(P_m/γ), ω*)` on the principal branch.
pub fn equilibrium_smib(p: &GeneratorParams) -> Result<SmibEquilibrium> {
    let gamma = p.require_gamma()?;
    let ratio = p.p_m() / gamma;
    if ratio.abs() > 1.0 {
        return Err(Error::NoEquilibrium(format!(
            "P_m / gamma = {ratio} exceeds the transferable power"
        )));
    }
    let delta_bar = ratio.asin();
    Ok(SmibEquilibrium {
        delta_bar,
        omega: p.omega_star(),
        roa_eligible: delta_bar > 0.0 && ratio < FRAC_2_PI,
    })
}

/// Folds the viscous loss `D_m` into damping `D = D_m + D_d` around the
/// shifted nominal speed `ω̃* = D_d ω* / D`.
pub fn reduce_losses(p: &GeneratorParams) -> Result<GeneratorParams> {
    if p.d_m() == 0.0 {
        return Ok(*p);
    }
    let d = p.d_m() + p.d_d();
    let omega_tilde = p.d_d() * p.omega_star() / d;
    p.with_nominal_speed(omega_tilde, d)
}
