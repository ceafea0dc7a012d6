//! C interface to the swing-equation simulator.
//!
//! Objects cross the boundary as opaque heap handles that the caller releases
//! with the matching `*_free` function. Every fallible call returns a
//! [`SwStatus`]; on failure a description is kept per thread and can be read
//! with [`sw_last_error`].
//!
//! State vectors are passed as [`SwState`]. Components a model does not use
//! are ignored on input and written as NaN on output. Absent optional values
//! are likewise reported as NaN.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use swingsim::{
    equilibria_load, equilibrium_smib, integrate, lyapunov, Error, GeneratorParams, IntegrationConfig, ModelKind,
    RoaKind, RoaSet, SimState, Trajectory, Verdict,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    SingularState = 3,
    NoEquilibrium = 4,
    ConditionViolated = 5,
    ShapeMismatch = 6,
    InvalidConfig = 7,
    Numerical = 8,
    OutOfRange = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwModel {
    ConventionalLoad = 0,
    ImprovedLoad = 1,
    ImprovedLoadWithLosses = 2,
    ImprovedClosedLoop = 3,
    SmibImproved = 4,
    SmibConventional = 5,
}

impl From<SwModel> for ModelKind {
    fn from(m: SwModel) -> Self {
        match m {
            SwModel::ConventionalLoad => ModelKind::ConventionalLoad,
            SwModel::ImprovedLoad => ModelKind::ImprovedLoad,
            SwModel::ImprovedLoadWithLosses => ModelKind::ImprovedLoadWithLosses,
            SwModel::ImprovedClosedLoop => ModelKind::ImprovedClosedLoop,
            SwModel::SmibImproved => ModelKind::SmibImproved,
            SwModel::SmibConventional => ModelKind::SmibConventional,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwRoaKind {
    OmegaS = 0,
    OmegaK = 1,
    OvalO = 2,
    SmibLevelSet = 3,
    SmibConventionalLevelSet = 4,
}

impl From<SwRoaKind> for RoaKind {
    fn from(k: SwRoaKind) -> Self {
        match k {
            SwRoaKind::OmegaS => RoaKind::OmegaS,
            SwRoaKind::OmegaK => RoaKind::OmegaK,
            SwRoaKind::OvalO => RoaKind::OvalO,
            SwRoaKind::SmibLevelSet => RoaKind::SmibLevelSet,
            SwRoaKind::SmibConventionalLevelSet => RoaKind::SmibConventionalLevelSet,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwVerdict {
    Converged = 0,
    Diverged = 1,
    HitSingularity = 2,
    MaxTime = 3,
}

/// Speed `omega` (rad/s), rotor angle `delta` (rad) and integrator state `xi`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwState {
    pub omega: f64,
    pub delta: f64,
    pub xi: f64,
}

impl SwState {
    fn to_state(self, model: ModelKind) -> SimState {
        SimState {
            omega: self.omega,
            delta: model.has_delta().then_some(self.delta),
            xi: model.has_xi().then_some(self.xi),
        }
    }

    fn from_state(s: &SimState) -> Self {
        Self { omega: s.omega, delta: s.delta.unwrap_or(f64::NAN), xi: s.xi.unwrap_or(f64::NAN) }
    }
}

/// Read-only view of a parameter set; `gamma` is NaN when unset.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwParamValues {
    pub j: f64,
    pub d_d: f64,
    pub m: f64,
    pub a: f64,
    pub omega_star: f64,
    pub d_m: f64,
    pub p_m: f64,
    pub p_e: f64,
    pub gamma: f64,
}

/// Speed equilibria; the roots are NaN when `exists` is false.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwEquilibriumPair {
    pub discriminant: f64,
    pub omega_s: f64,
    pub omega_u: f64,
    pub exists: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwSmibEquilibrium {
    pub delta_bar: f64,
    pub omega: f64,
    pub roa_eligible: bool,
}

/// Level-set constants of the infinite-bus estimate; `c_k` is NaN for the conventional model.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwSmibConstants {
    pub c_k: f64,
    pub c_p: f64,
    pub c: f64,
    pub delta_bar: f64,
    pub delta_minus: f64,
}

/// Integration settings. `angle_bound <= 0` or NaN disables the angle check,
/// and `lyapunov` is only read when `has_lyapunov` is true.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwIntegrationConfig {
    pub dt: f64,
    pub t_max: f64,
    pub conv_tol: f64,
    pub div_bound: f64,
    pub angle_bound: f64,
    pub record_every: usize,
    pub has_lyapunov: bool,
    pub lyapunov: SwRoaKind,
}

impl From<&SwIntegrationConfig> for IntegrationConfig {
    fn from(c: &SwIntegrationConfig) -> Self {
        IntegrationConfig {
            dt: c.dt,
            t_max: c.t_max,
            conv_tol: c.conv_tol,
            div_bound: c.div_bound,
            angle_bound: (c.angle_bound > 0.0).then_some(c.angle_bound),
            lyapunov: c.has_lyapunov.then(|| c.lyapunov.into()),
            record_every: c.record_every,
        }
    }
}

/// One recorded point; `v` and `vdot` are NaN when no Lyapunov function was attached.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwSample {
    pub t: f64,
    pub state: SwState,
    pub v: f64,
    pub vdot: f64,
}

/// Opaque parameter set.
pub struct SwParams(GeneratorParams);

/// Opaque region-of-attraction estimate.
pub struct SwRoaSet(RoaSet);

/// Opaque integrated trajectory.
pub struct SwTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SwStatus {
    match e {
        Error::InvalidParams(_) => SwStatus::InvalidParams,
        Error::SingularState { .. } => SwStatus::SingularState,
        Error::NoEquilibrium(_) => SwStatus::NoEquilibrium,
        Error::ConditionViolated(_) => SwStatus::ConditionViolated,
        Error::ShapeMismatch(_) => SwStatus::ShapeMismatch,
        Error::InvalidConfig(_) => SwStatus::InvalidConfig,
        Error::Numerical(_) | Error::Io(_) => SwStatus::Numerical,
    }
}

struct Fail(SwStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(SwStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SwStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            SwStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn nan_or(x: Option<f64>) -> f64 {
    x.unwrap_or(f64::NAN)
}

/// Message describing the last failure on this thread, or null if none.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates parameters from inertia `j`, damping `d_d` and nominal speed `omega_star`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn sw_params_from_inertia(j: f64, d_d: f64, omega_star: f64, out: *mut *mut SwParams) -> SwStatus {
    guard(|| {
        let p = GeneratorParams::from_inertia(j, d_d, omega_star)?;
        write(out, Box::into_raw(Box::new(SwParams(p))), "out")
    })
}

/// Creates parameters from angular momentum `m`, damping `a` and nominal speed `omega_star`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn sw_params_from_momentum(m: f64, a: f64, omega_star: f64, out: *mut *mut SwParams) -> SwStatus {
    guard(|| {
        let p = GeneratorParams::from_momentum(m, a, omega_star)?;
        write(out, Box::into_raw(Box::new(SwParams(p))), "out")
    })
}

unsafe fn update(
    params: *mut SwParams,
    f: impl FnOnce(GeneratorParams) -> swingsim::Result<GeneratorParams>,
) -> SwStatus {
    guard(|| {
        let handle = params.as_mut().ok_or_else(|| null("params"))?;
        handle.0 = f(handle.0)?;
        Ok(())
    })
}

/// Sets mechanical and electrical power.
///
/// # Safety
/// `params` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn sw_params_set_powers(params: *mut SwParams, p_m: f64, p_e: f64) -> SwStatus {
    update(params, |p| p.with_powers(p_m, p_e))
}

/// Sets the infinite-bus coupling `gamma`.
///
/// # Safety
/// `params` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn sw_params_set_gamma(params: *mut SwParams, gamma: f64) -> SwStatus {
    update(params, |p| p.with_gamma(gamma))
}

/// Sets the mechanical loss coefficient `d_m`.
///
/// # Safety
/// `params` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn sw_params_set_mech_losses(params: *mut SwParams, d_m: f64) -> SwStatus {
    update(params, |p| p.with_mech_losses(d_m))
}

/// Copies all parameter values into `out`.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sw_params_get(params: *const SwParams, out: *mut SwParamValues) -> SwStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        let v = SwParamValues {
            j: p.j(),
            d_d: p.d_d(),
            m: p.m(),
            a: p.a(),
            omega_star: p.omega_star(),
            d_m: p.d_m(),
            p_m: p.p_m(),
            p_e: p.p_e(),
            gamma: nan_or(p.gamma()),
        };
        write(out, v, "out")
    })
}

/// Releases a parameter handle. Null is ignored.
///
/// # Safety
/// `params` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sw_params_free(params: *mut SwParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Evaluates the right-hand side of `model` at `state`.
///
/// # Safety
/// `params` must be a live handle, `state` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sw_rhs(
    model: SwModel,
    params: *const SwParams,
    state: *const SwState,
    out: *mut SwState,
) -> SwStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        let kind = ModelKind::from(model);
        let s = deref(state, "state")?.to_state(kind);
        let d = kind.rhs(p, &s)?;
        let v = SwState { omega: d.omega, delta: nan_or(d.delta), xi: nan_or(d.xi) };
        write(out, v, "out")
    })
}

/// Speed equilibria of the improved load model under reference input `u_bar`.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sw_equilibria_load(
    params: *const SwParams,
    u_bar: f64,
    out: *mut SwEquilibriumPair,
) -> SwStatus {
    guard(|| {
        let eq = equilibria_load(&deref(params, "params")?.0, u_bar);
        let v = SwEquilibriumPair {
            discriminant: eq.discriminant,
            omega_s: nan_or(eq.omega_s),
            omega_u: nan_or(eq.omega_u),
            exists: eq.exists,
        };
        write(out, v, "out")
    })
}

/// Operating point of the infinite-bus model.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sw_equilibrium_smib(params: *const SwParams, out: *mut SwSmibEquilibrium) -> SwStatus {
    guard(|| {
        let eq = equilibrium_smib(&deref(params, "params")?.0)?;
        let v = SwSmibEquilibrium { delta_bar: eq.delta_bar, omega: eq.omega, roa_eligible: eq.roa_eligible };
        write(out, v, "out")
    })
}

/// Level-set constants for the improved (`improved = true`) or conventional infinite-bus model.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sw_smib_constants(
    params: *const SwParams,
    improved: bool,
    out: *mut SwSmibConstants,
) -> SwStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        let k = if improved { lyapunov::smib_constants(p)? } else { lyapunov::smib_conventional_constants(p)? };
        let v = SwSmibConstants {
            c_k: nan_or(k.c_k),
            c_p: k.c_p,
            c: k.c,
            delta_bar: k.delta_bar,
            delta_minus: k.delta_minus,
        };
        write(out, v, "out")
    })
}

/// Builds a region-of-attraction estimate. `u_bar` is only used by `OmegaK`.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sw_roa_new(
    kind: SwRoaKind,
    params: *const SwParams,
    u_bar: f64,
    out: *mut *mut SwRoaSet,
) -> SwStatus {
    guard(|| {
        let set = RoaSet::build(kind.into(), &deref(params, "params")?.0, u_bar)?;
        write(out, Box::into_raw(Box::new(SwRoaSet(set))), "out")
    })
}

/// Sublevel value bounding the set.
///
/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sw_roa_level(set: *const SwRoaSet, out: *mut f64) -> SwStatus {
    guard(|| write(out, deref(set, "set")?.0.level, "out"))
}

/// Lyapunov function of the set evaluated at `state`.
///
/// # Safety
/// `set` must be a live handle, `state` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sw_roa_value(set: *const SwRoaSet, state: *const SwState, out: *mut f64) -> SwStatus {
    guard(|| {
        let set = &deref(set, "set")?.0;
        let s = deref(state, "state")?.to_state(set.model());
        write(out, set.value(&s)?, "out")
    })
}

/// Whether `state` lies in the set.
///
/// # Safety
/// `set` must be a live handle, `state` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sw_roa_contains(set: *const SwRoaSet, state: *const SwState, out: *mut bool) -> SwStatus {
    guard(|| {
        let set = &deref(set, "set")?.0;
        let s = deref(state, "state")?.to_state(set.model());
        write(out, set.contains(&s)?, "out")
    })
}

/// Releases a set handle. Null is ignored.
///
/// # Safety
/// `set` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sw_roa_free(set: *mut SwRoaSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Fills `out` with the default integration settings for `params`.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sw_integration_config_default(
    params: *const SwParams,
    out: *mut SwIntegrationConfig,
) -> SwStatus {
    guard(|| {
        let c = IntegrationConfig::default_for(&deref(params, "params")?.0);
        let v = SwIntegrationConfig {
            dt: c.dt,
            t_max: c.t_max,
            conv_tol: c.conv_tol,
            div_bound: c.div_bound,
            angle_bound: f64::NAN,
            record_every: c.record_every,
            has_lyapunov: false,
            lyapunov: SwRoaKind::OmegaS,
        };
        write(out, v, "out")
    })
}

/// Integrates `model` from `initial`.
///
/// # Safety
/// `params` must be a live handle, `initial` and `config` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sw_integrate(
    model: SwModel,
    params: *const SwParams,
    initial: *const SwState,
    config: *const SwIntegrationConfig,
    out: *mut *mut SwTrajectory,
) -> SwStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        let kind = ModelKind::from(model);
        let s0 = deref(initial, "initial")?.to_state(kind);
        let cfg = IntegrationConfig::from(deref(config, "config")?);
        let tr = integrate(kind, p, &s0, &cfg)?;
        write(out, Box::into_raw(Box::new(SwTrajectory(tr))), "out")
    })
}

/// Number of recorded samples, or 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sw_trajectory_len(traj: *const SwTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.samples.len())
}

/// Copies sample `index` into `out`.
///
/// # Safety
/// `traj` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sw_trajectory_sample(traj: *const SwTrajectory, index: usize, out: *mut SwSample) -> SwStatus {
    guard(|| {
        let t = &deref(traj, "traj")?.0;
        let s = t.samples.get(index).ok_or_else(|| {
            Fail(SwStatus::OutOfRange, format!("sample {index} out of range for {} samples", t.samples.len()))
        })?;
        let v = SwSample { t: s.t, state: SwState::from_state(&s.state), v: nan_or(s.v), vdot: nan_or(s.vdot) };
        write(out, v, "out")
    })
}

/// Outcome of the run. `event_time` receives the singularity time, or the final time otherwise.
///
/// # Safety
/// `traj` must be a live handle, `out` writable and `event_time` null or writable.
#[no_mangle]
pub unsafe extern "C" fn sw_trajectory_verdict(
    traj: *const SwTrajectory,
    out: *mut SwVerdict,
    event_time: *mut f64,
) -> SwStatus {
    guard(|| {
        let t = &deref(traj, "traj")?.0;
        let (v, at) = match t.verdict {
            Verdict::Converged { .. } => (SwVerdict::Converged, t.final_time()),
            Verdict::Diverged => (SwVerdict::Diverged, t.final_time()),
            Verdict::HitSingularity { t: at } => (SwVerdict::HitSingularity, at),
            Verdict::MaxTime => (SwVerdict::MaxTime, t.final_time()),
        };
        if !event_time.is_null() {
            event_time.write(at);
        }
        write(out, v, "out")
    })
}

/// Releases a trajectory handle. Null is ignored.
///
/// # Safety
/// `traj` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sw_trajectory_free(traj: *mut SwTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}
