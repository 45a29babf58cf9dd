use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Zero spread, constant data or too few observations.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A quadrature integrand was not finite at one of the rule's nodes.
    #[error("integrand is {value} at node x = {node:e}")]
    Integration { node: f64, value: f64 },

    /// A functional required by an oracle bandwidth is infinite for this density.
    #[error("divergent integral: {0}")]
    Divergence(String),

    #[error("optimization failed: {0}")]
    Optimization(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Input file problems that carry a location.
    #[error("{path}: {detail}")]
    Input { path: String, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }
}
