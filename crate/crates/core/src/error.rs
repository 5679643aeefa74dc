use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid spin j = {0}: must be a positive half-integer")]
    InvalidSpin(String),

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("{what} did not converge after {iterations} iterations (last residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("Hamiltonian would need {nonzeros} nonzeros, above the cap of {cap}")]
    DimensionCap { nonzeros: usize, cap: usize },

    #[error("photon cutoff reached the ceiling n_max = {n_max} with energy gap {gap:e} still above tolerance {tol:e}")]
    CutoffCeiling { n_max: usize, gap: f64, tol: f64 },

    #[error("variational bound violated: mean-field {mean_field} < exact {exact}")]
    VariationalBound { mean_field: f64, exact: f64 },

    #[error("{failed} of {total} sweep rows failed; first: {first}")]
    RowFailures {
        failed: usize,
        total: usize,
        first: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("writing {}: {source}", path.display())]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Process exit status: 1 for validation and I/O problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. }
            | Error::CutoffCeiling { .. }
            | Error::VariationalBound { .. }
            | Error::RowFailures { .. } => 2,
            _ => 1,
        }
    }
}
