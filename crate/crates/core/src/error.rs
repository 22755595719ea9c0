use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shot manifest contains no shots")]
    EmptyManifest,
    #[error("shot {id}: duration must be at least one frame (got {td})")]
    NegativeDuration { id: usize, td: i64 },
    #[error("shot {id}: time code {found} contradicts the duration/transition chain (expected {expected})")]
    NonContiguousTimeline { id: usize, expected: u64, found: i64 },
    #[error("shot {position}: id {found} out of order (expected {position})")]
    IdMismatch { position: usize, found: i64 },
    #[error("shot {id}: invalid transition: {reason}")]
    InvalidTransition { id: usize, reason: String },
    #[error("bins per channel must lie in [2, 256], got {0}")]
    InvalidBinCount(u32),
    #[error("histogram layouts differ ({left} vs {right} bins per channel)")]
    LayoutMismatch { left: u32, right: u32 },
    #[error("reference histogram is empty")]
    EmptyReferenceHistogram,
    #[error("histogram has {found} bins, expected {expected}")]
    HistogramLength { expected: usize, found: usize },
    #[error("image must have at least one pixel and {expected} bytes of RGB data")]
    InvalidImage { expected: usize },
    #[error("{path}: {reason}")]
    Ppm { path: PathBuf, reason: String },
    #[error("shot {0} has no histogram")]
    MissingHistogram(usize),
    #[error("temporal graph contains a cycle through cluster {0}")]
    CycleDetected(usize),
    #[error("scene over clusters {clusters:?} spans shot {shot} of a foreign group")]
    NonContiguousScene { clusters: Vec<usize>, shot: usize },
    #[error("rhythm statistics need at least two shots, got {0}")]
    GroupTooSmall(usize),
    #[error("shot {candidate} is not adjacent to the group on the {side} side")]
    NotAdjacent { candidate: usize, side: &'static str },
    #[error("both point patterns are empty")]
    BothEmpty,
    #[error("unrealizable fixture: {0}")]
    UnrealizableSpec(String),
    #[error("segmentation covers {predicted} shots but ground truth covers {truth}")]
    UniverseMismatch { predicted: usize, truth: usize },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// True for errors caused by bad input rather than a broken pipeline invariant.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::CycleDetected(_) | Error::NonContiguousScene { .. } | Error::Invariant(_)
        )
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { context: context.into(), source }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json { context: context.into(), source }
    }
}
