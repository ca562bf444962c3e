//! Corpus generation, scenarios, run logs, the offline and bus-backed
//! pipelines, and the UI gateway.

mod config;
mod corpus_gen;
pub mod gateway;
mod pipeline;
mod runlog;
mod scenario;
mod training;

pub use config::{seed_from_env, train_model, PipelineConfig, DEFAULT_SEED, SEED_ENV};
pub use corpus_gen::{gen_corpus, DEFAULT_CORPUS_SIZE, MIN_CORPUS_SIZE};
pub use gateway::{serve_gateway, ChatTurn, ClientFrame, GatewayHandle, GatewayRecord, RecordType, SnapshotBody};
pub use pipeline::{replay, Pipeline, Runner};
pub use runlog::RunLog;
pub use scenario::{EventKind, Expect, Say, Scenario, BUNDLED_SCENARIOS};
pub use training::{
    cross_calibrate, filler_flip_rate, insert_filler, train_and_evaluate, EvalReport, CALIBRATION_FOLDS, TRAIN_FRACTION,
};

use crate::bridge::BridgeError;
use crate::messaging::MessagingError;
use crate::navigator::NavigatorError;
use crate::nlu::NluError;
use crate::simworld::SimError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("io: {0}")]
    Io(String),
    #[error("config: {0}")]
    Config(String),
    #[error("scenario: {0}")]
    Scenario(String),
    #[error("format: {0}")]
    Format(String),
    #[error("timed out: {0}")]
    Timeout(String),
    #[error(transparent)]
    Nlu(#[from] NluError),
    #[error(transparent)]
    Messaging(#[from] MessagingError),
    #[error(transparent)]
    Bridge(#[from] BridgeError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Navigator(#[from] NavigatorError),
}
