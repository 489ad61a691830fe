use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{operation} is only defined for {requirement} (got a = {a})")]
    Domain {
        operation: &'static str,
        requirement: &'static str,
        a: f64,
    },

    #[error("time {t} is outside the supported range |t| <= {limit}")]
    TimeOutOfRange { t: f64, limit: f64 },

    #[error("matrix exponential overflowed: intermediate magnitude {magnitude:e}")]
    Overflow { magnitude: f64 },

    #[error("evolved state lost all weight at t = {t} (trace {norm:e})")]
    DegenerateNorm { t: f64, norm: f64 },

    #[error("invalid density matrix: {reason} ({value:e})")]
    InvalidState { reason: &'static str, value: f64 },

    #[error("decomposition is degenerate: sqrt(A^2+B^2)+|C| = {value:e}")]
    DegenerateDecomposition { value: f64 },

    #[error("count records do not determine a two-qubit state: {reason}")]
    Underdetermined { reason: &'static str },

    #[error("maximum-likelihood estimation did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
}

impl Error {
    /// Errors caused by bad input rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::Domain { .. }
                | Error::TimeOutOfRange { .. }
                | Error::InvalidState { .. }
                | Error::Underdetermined { .. }
        )
    }
}
