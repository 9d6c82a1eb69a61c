use thiserror::Error;

use crate::metric_graph::Cat1Violation;

pub type Result<T, E = StrataError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StrataError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("link is not CAT(1): {0}")]
    NotCat1(Cat1Violation),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("spine dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("shortest path is not unique (cut locus)")]
    CutLocus,

    #[error("logs undefined at the mean for atoms {0:?}")]
    CutLocusAtoms(Vec<usize>),

    #[error("geodesic is ambiguous: several shortest link paths of equal length")]
    AmbiguousGeodesic,

    #[error("step leaves the region where the exponential map is defined")]
    StepTooLarge,

    #[error("measure is not retractable: atoms {0:?} have no unique log at the mean")]
    NotRetractable(Vec<usize>),

    #[error("cone has no nonzero member")]
    EmptyCone,

    #[error("devissage did not terminate within {0} steps")]
    IterationBound(usize),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("unknown gallery entry: {0}")]
    UnknownGallery(String),
}
