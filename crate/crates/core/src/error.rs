use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller-supplied function produced a non-finite value.
    #[error("input error: {0}")]
    Input(String),

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error(
        "quadrature did not converge: estimate {estimate:e} with error {error_estimate:e} \
         after {evaluations} evaluations"
    )]
    NoConvergence {
        estimate: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    /// Derivative-based quantity requested at a point where it degenerates.
    #[error("degenerate point: {0}")]
    Degenerate(String),

    #[error("unknown check `{0}`")]
    UnknownCheck(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
