use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A network or estimator configuration is invalid.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A fading state or SNR vector does not have the shape the network requires.
    #[error("structural mismatch: {0}")]
    Structure(String),
    /// The configuration is valid but the requested quantity is not defined for it.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    /// A numeric argument lies outside the domain of the function.
    #[error("argument outside domain: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
