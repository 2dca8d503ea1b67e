use thiserror::Error;

/// Errors raised anywhere in the simulation and control stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A configuration value is out of range or inconsistent with another.
    #[error("configuration error: {0}")]
    Config(String),

    /// An operation was called with arguments violating its precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The dense-unitary oracle was asked for a register it cannot hold.
    #[error("oracle supports at most {max} qubits, got {got}")]
    OracleSize { max: usize, got: usize },

    /// Requested computation is undefined in the selected mode.
    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),

    /// A NaN or infinity appeared in an intermediate quantity.
    #[error("non-finite value in {context}")]
    Numerical { context: String },

    /// A plant was driven into a singular configuration.
    #[error("plant singularity: {0}")]
    Singularity(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(values: &[f64], context: impl FnOnce() -> String) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numerical { context: context() })
    }
}
