use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix {matrix:?} is not a hyperbolic toral automorphism: {reason}")]
    NotHyperbolic {
        matrix: [[i64; 2]; 2],
        reason: &'static str,
    },

    #[error("displacement field is not real-valued: coefficient of component {component} at {k:?} has no conjugate partner")]
    NotRealValued { component: usize, k: [i64; 2] },

    #[error("displacement too large: sup |Du| = {sup:.6} exceeds kappa_max = {kappa_max}")]
    DisplacementTooLarge { sup: f64, kappa_max: f64 },

    #[error("inverse chart iteration did not converge after {iterations} iterations (last step {step:e})")]
    InverseNotConverged { iterations: usize, step: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("truncation N = {requested} exceeds the memory budget N <= {budget}")]
    BudgetExceeded { requested: usize, budget: usize },

    #[error("period {period}: {count} periodic points exceed the enumeration limit {limit}")]
    TooManyPeriodicPoints { period: u32, count: u128, limit: u128 },

    #[error("integer overflow while forming {0}")]
    Overflow(&'static str),

    #[error("periodic point check failed: {0}")]
    PeriodicPoint(String),

    #[error("LAPACK routine {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },

    #[error("Galerkin matrix lacks conjugate symmetry (defect {0:e})")]
    NotConjugateSymmetric(f64),

    #[error("aliasing: {0}")]
    Aliasing(String),

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
