use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Partial output of a two-part test whose binary component failed.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialResult {
    pub w1: f64,
    pub mu_delta_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no sign change on bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("no convergence after {iterations} iterations (best iterate {best})")]
    Convergence { iterations: usize, best: f64 },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("design matrix is rank deficient (column {column})")]
    SingularDesign { column: usize },

    #[error("degenerate fit: residual sum of squares is zero")]
    DegenerateFit,

    #[error("separation in logistic model: coefficient of column {column} diverges")]
    Separation {
        column: usize,
        partial: Option<Box<PartialResult>>,
    },

    #[error("models are not nested: full log-likelihood {full} < reduced {reduced}")]
    ModelNesting { full: f64, reduced: f64 },

    #[error("continuous part undefined: the {} group has {observed} observed outcome(s), need at least 2", arm_name(*group))]
    ContinuousPartUndefined { group: usize, observed: usize },

    #[error("mean {mu} lies outside the open convex hull of the data")]
    Hull { mu: f64 },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("confidence region unavailable: {0}")]
    Region(String),

    #[error("scenario config: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// Whether the error reflects a property of the data (as opposed to bad input).
    pub fn is_statistical(&self) -> bool {
        matches!(
            self,
            Error::SingularDesign { .. }
                | Error::DegenerateFit
                | Error::Separation { .. }
                | Error::ContinuousPartUndefined { .. }
                | Error::Hull { .. }
                | Error::Degenerate(_)
                | Error::Region(_)
                | Error::Convergence { .. }
                | Error::ModelNesting { .. }
        )
    }
}

fn arm_name(group: usize) -> &'static str {
    if group == 0 {
        "control"
    } else {
        "treatment"
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
