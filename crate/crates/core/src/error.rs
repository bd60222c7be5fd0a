use crate::ode::OdeError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what} is singular at the boundary x = 0")]
    SingularAtBoundary { what: &'static str },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("step control failed: {0}")]
    ToleranceFailure(#[from] OdeError),
    #[error("ray did not exit through x = 0 (status {0:?})")]
    NoExit(crate::flow::RayStatus),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("field touches the x-faces of the grid; request the boundary term explicitly")]
    UnsupportedSupport,
    #[error("invalid options: {0}")]
    InvalidOptions(String),
}

pub type Result<T> = std::result::Result<T, Error>;
