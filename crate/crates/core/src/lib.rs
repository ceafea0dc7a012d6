//! Simulation and Lyapunov analysis of the improved swing equation.
//!
//! The improved model keeps the speed-dependent terms `Jω` and `D_dω` that the
//! conventional swing equation freezes at nominal speed. This crate evaluates
//! both families, their equilibria and energy functions, and the analytic
//! region-of-attraction estimates that go with them.

pub mod equilibria;
pub mod error;
pub mod integrator;
pub mod levelset;
pub mod lyapunov;
pub mod models;
pub mod output;
pub mod params;
pub mod scenario;
pub mod sweep;

pub use equilibria::{
    discriminant, equilibria_load, equilibrium_smib, reduce_losses, EquilibriumPair, SmibEquilibrium,
};
pub use error::{Error, Result, SmibCondition};
pub use integrator::{halve_step_check, integrate, IntegrationConfig, Sample, Trajectory, Verdict};
pub use lyapunov::{RoaConstants, RoaKind, RoaSet, SmibConstants, SmibVariant};
pub use params::{Derivative, GeneratorParams, ModelKind, SimState, OMEGA_GUARD};
