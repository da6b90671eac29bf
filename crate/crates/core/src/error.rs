use thiserror::Error;

use crate::fieldlang::FieldError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("point {point:?} lies in excluded region #{region}")]
    Excluded { point: Vec<f64>, region: usize },
    #[error("metric at {point:?} is singular or not positive definite (condition {condition:e})")]
    SingularMetric { point: Vec<f64>, condition: f64 },
    #[error("effective beta {beta:e} is not positive at {point:?}")]
    DegenerateBeta { point: Vec<f64>, beta: f64 },
    #[error("geodesic system is singular at {point:?} (|det| = {det:e})")]
    SingularSystem { point: Vec<f64>, det: f64 },
    #[error("delta vanishes at {point:?}")]
    VanishingDelta { point: Vec<f64> },
    #[error("path is constant")]
    ConstantPath,
    #[error("reconstructed curve is not lightlike on segment {segment} (norm {norm:e})")]
    NotLightlike { segment: usize, norm: f64 },
    #[error("trajectory left the domain at s = {s}: {reason}")]
    DomainExit { s: f64, reason: String },
    #[error("line search failed: {0}")]
    LineSearch(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid scenario:\n{}", .0.join("\n"))]
    Scenario(Vec<String>),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Error {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
