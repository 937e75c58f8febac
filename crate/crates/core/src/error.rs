use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the numerical modules and the CLI plumbing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("frequency {omega:e} rad/s outside tabulated range [{min:e}, {max:e}]")]
    OutOfRange { omega: f64, min: f64, max: f64 },

    #[error("quadrature did not converge: estimated error {achieved:e} above requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("{0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 config, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse { .. } => 2,
            Error::Io(_) => 4,
            _ => 3,
        }
    }
}
