use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    /// A probability that must stay below one reached it (or the model divides by zero).
    #[error("singular model: {0}")]
    SingularModel(String),

    /// The closed form produced a value outside its valid range.
    #[error("model validity violated: {0}")]
    ModelValidity(String),

    /// Inputs do not describe a valid operating point (e.g. a negative residual event probability).
    #[error("model inconsistency: {0}")]
    Inconsistent(String),

    #[error(
        "fixed point did not converge after {iterations} iterations (residual {residual:.3e})"
    )]
    NoConvergence {
        iterations: usize,
        residual: f64,
        /// Residual max-norm sampled along the run, oldest first.
        trace: Vec<f64>,
    },

    #[error("at n_mld={n_mld}, n_sld={n_sld}: {source}")]
    AtPoint {
        n_mld: u32,
        n_sld: u32,
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// The error with any sweep-point annotation removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtPoint { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn is_usage(&self) -> bool {
        matches!(
            self.root(),
            Error::InvalidConfig(_) | Error::ConfigParse { .. }
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}
