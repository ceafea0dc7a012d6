use thiserror::Error;

/// Which of the two infinite-bus region-of-attraction conditions failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmibCondition {
    /// ω* > √(γ / D_d)
    NominalSpeed,
    /// P_m / γ < 2/π
    LoadAngle,
}

impl std::fmt::Display for SmibCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SmibCondition::NominalSpeed => write!(f, "omega_star > sqrt(gamma / D_d)"),
            SmibCondition::LoadAngle => write!(f, "P_m / gamma < 2/pi"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("state is singular: omega = {omega} rad/s is not above the guard")]
    SingularState { omega: f64 },

    #[error("no equilibrium: {0}")]
    NoEquilibrium(String),

    #[error("region-of-attraction condition violated: {0}")]
    ConditionViolated(SmibCondition),

    #[error("state shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
