use thiserror::Error;

/// Errors raised by the torsion library.
#[derive(Debug, Clone, Error)]
pub enum TorsionError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("ill-conditioned {what}: ambiguous spectral gap {gap:e}")]
    IllConditioned { what: String, gap: f64 },
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("input error: {0}")]
    Input(String),
}

impl TorsionError {
    /// True for violations of data invariants (as opposed to malformed input
    /// or numerical trouble).
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            TorsionError::Inconsistent(_) | TorsionError::Construction(_) | TorsionError::Domain(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, TorsionError>;
