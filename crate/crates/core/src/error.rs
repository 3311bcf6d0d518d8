use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },

    #[error("ratio {0} is undefined for these parameters")]
    UndefinedRatio(&'static str),

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("reduced density matrix eigenvalue {value} lies outside [0, 1]")]
    EigenvalueOutOfRange { value: f64 },

    #[error("eigensolver failed for matrix of order {order}: {reason}")]
    EigenSolver { order: usize, reason: &'static str },

    #[error("requested {requested} states but only {available} are available")]
    StateCount { requested: usize, available: usize },

    #[error("delocalized estimate is singular at hbar_omega = 2|J|")]
    DelocalizedPole,

    #[error("{0} requires a nonzero resonance coupling J")]
    ZeroCoupling(&'static str),
}
