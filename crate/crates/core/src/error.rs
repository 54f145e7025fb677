use std::path::PathBuf;

/// Errors produced by the simulator and estimation pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input violated an operation's documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("matrix is numerically singular (condition number {condition:.3e})")]
    Singular { condition: f64 },

    #[error("degenerate bistatic geometry: {0}")]
    DegenerateGeometry(String),

    #[error("bistatic range {d_bis} m does not exceed baseline {baseline} m")]
    InfeasibleEllipse { d_bis: f64, baseline: f64 },

    /// Root selection produced fewer admissible roots than requested.
    /// `partial` holds whatever was recovered (degrees or m/s depending on stage).
    #[error("estimation failure: {reason} (recovered {} of {wanted})", partial.len())]
    Estimation {
        reason: String,
        wanted: usize,
        partial: Vec<f64>,
    },

    #[error("eigen/Schur iteration did not converge for {0}x{0} matrix")]
    NoConvergence(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
