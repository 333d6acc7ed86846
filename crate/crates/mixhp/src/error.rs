//! Crate-wide error type.

use crate::model::EventSequence;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("event type {kind} out of range for {num_types} types")]
    KindOutOfRange { kind: usize, num_types: usize },

    #[error("time {t} outside observation window [0, {horizon}]")]
    TimeOutOfWindow { t: f64, horizon: f64 },

    #[error("invalid sequence `{id}`: {reason}")]
    InvalidSequence { id: String, reason: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("zero intensity at event {index} (t = {t}): log-likelihood is -inf")]
    SingularLikelihood { index: usize, t: f64 },

    #[error("easiness is undefined for an empty sequence")]
    EmptySequence,

    #[error("type-count mismatch: {left} vs {right}")]
    TypeCountMismatch { left: usize, right: usize },

    #[error("need at least {needed} sequences, got {got}")]
    NotEnoughSequences { needed: usize, got: usize },

    #[error("event cap {cap} reached before the horizon; partial sequence retained")]
    EventCapReached {
        cap: usize,
        partial: Box<EventSequence>,
    },

    #[error("objective became non-finite: {0}")]
    NonFiniteObjective(String),

    #[error("labels unavailable: {0}")]
    MissingLabels(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("malformed data in {path} line {line}: {reason}")]
    MalformedData {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("malformed model file {path}: {reason}")]
    MalformedModel { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
