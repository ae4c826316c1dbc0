use thiserror::Error;

/// Errors raised anywhere in the pipeline, from configuration to the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("direction (u={u}, v={v}) lies outside the unit disk")]
    InvalidDirection { u: f64, v: f64 },

    #[error(
        "user not visible: elevation {elevation_deg:.3} deg below mask {min_elevation_deg} deg"
    )]
    UserNotVisible {
        elevation_deg: f64,
        min_elevation_deg: f64,
    },

    #[error("user {user} has no candidate cluster on any satellite")]
    NoCandidateCluster { user: usize },

    #[error("cluster {cluster} of user {user} has an all-zero direct channel")]
    ZeroDirectChannel { user: usize, cluster: usize },

    #[error("infeasible: multiplier of user {user} reached {lambda:e}, above cap {cap:e}")]
    Infeasible { user: usize, lambda: f64, cap: f64 },

    #[error("fixed point did not converge in {iterations} iterations (last relative change {max_delta:e})")]
    NotConverged { iterations: usize, max_delta: f64 },

    #[error("power-scaling matrix is numerically singular (condition estimate {condition:e})")]
    SingularF { condition: f64 },

    #[error("negative power scaling {delta:e} for user {user}")]
    NegativePower { user: usize, delta: f64 },

    #[error("user {user} reaches SINR {achieved} instead of target {target}")]
    TargetMissed {
        user: usize,
        achieved: f64,
        target: f64,
    },

    #[error("oracle would evaluate {assignments} assignments, cap is {cap}")]
    OracleTooLarge { assignments: u128, cap: u128 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Parse(_) | Error::InvalidDirection { .. } => 2,
            Error::Infeasible { .. } => 3,
            Error::NotConverged { .. } => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
