use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("{op}: eigenvalue {eigenvalue:e} is outside the function domain (must be > 0)")]
    Domain { op: &'static str, eigenvalue: f64 },

    #[error("log undefined: points at distance {distance} are (nearly) antipodal")]
    Antipodal { distance: f64 },

    #[error("cot pole: sqrt(K_max)*D = {0} >= pi")]
    CurvaturePole(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("eigendecomposition did not converge")]
    NoConvergence,

    #[error("baseline unavailable: {0}")]
    Unavailable(String),

    #[error("f_star = {f_star} is not a lower bound: observed f = {observed}")]
    InvalidOptimum { f_star: f64, observed: f64 },

    #[error("restart contraction not reached within {budget} inner iterations")]
    RestartBudget { budget: usize },

    #[error("iteration {k}: {source}")]
    AtIteration {
        k: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at(self, k: usize) -> Self {
        match self {
            e @ Error::AtIteration { .. } => e,
            e => Error::AtIteration {
                k,
                source: Box::new(e),
            },
        }
    }

    /// Iteration index attached by [`Error::at`], if any.
    pub fn iteration(&self) -> Option<usize> {
        match self {
            Error::AtIteration { k, .. } => Some(*k),
            _ => None,
        }
    }
}
