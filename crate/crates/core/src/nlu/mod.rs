//! Retrieval-based classification of Commander utterances into trained
//! response classes, with the hybrid instruction/feedback routing on top.

mod corpus;
mod model;
mod tokenize;

pub use corpus::{Corpus, Label, TrainingPair};
pub use model::{
    class_id, rank, reject_id, threshold_from_rows, CalibrationRow, Classification, Hit, HybridOutput, RelevanceModel, ResponseClass, DEFAULT_LAMBDA,
    NEGATIVE_FEEDBACK,
};
pub use tokenize::tokenize;

/// Filler tokens the classifier should be robust to.
pub const FILLERS: [&str; 3] = ["uh", "um", "like"];

#[derive(Debug, thiserror::Error)]
pub enum NluError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("held-out set is empty")]
    EmptyHeldout,
    #[error("invalid training pair: {0}")]
    InvalidPair(String),
    #[error("invalid corpus: {0}")]
    InvalidCorpus(String),
    #[error("smoothing weight must lie in (0, 1), got {0}")]
    BadLambda(f64),
    #[error("model file: {0}")]
    Format(String),
}
