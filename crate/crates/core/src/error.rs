use thiserror::Error;

/// Errors raised by the control toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QocError {
    /// Invalid parameters, mismatched grids and similar setup problems.
    #[error("configuration error: {0}")]
    Config(String),

    /// A value lies outside the mathematical domain of an observable.
    #[error("domain error: {what} = {value} lies outside the allowed range")]
    Domain { what: &'static str, value: f64 },

    /// The cavity amplitude vanished, so `ċ/c` is undefined.
    #[error("amplitude sample {index} is zero; decay rate is singular there")]
    Singularity { index: usize },

    /// The requested feature is narrower than the grid can resolve.
    #[error("width {width} is narrower than two grid steps ({min})")]
    Resolution { width: f64, min: f64 },

    /// The starting protocol does not satisfy the endpoint constraint.
    #[error("protocol is not admissible: |Γ_τ - budget| = {residual:e} exceeds {tol:e}")]
    Inadmissible { residual: f64, tol: f64 },

    /// The cost became non-finite for every trial step size.
    #[error("cost diverged at iteration {iteration} (last epsilon {epsilon:e}); try a smaller step size")]
    Divergence { iteration: usize, epsilon: f64 },

    /// A step search exhausted its halvings without lowering the cost.
    #[error("no decrease after {halvings} halvings (epsilon reached {epsilon:e})")]
    Stall { halvings: usize, epsilon: f64 },

    /// Malformed protocol file.
    #[error("protocol file, row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, QocError>;

impl From<std::io::Error> for QocError {
    fn from(e: std::io::Error) -> Self {
        QocError::Io(e.to_string())
    }
}
