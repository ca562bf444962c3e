use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::bridge::{load_rules, BridgeConfig};
use crate::harness::{cross_calibrate, gen_corpus, CALIBRATION_FOLDS, DEFAULT_CORPUS_SIZE};
use crate::navigator::MotionProfile;
use crate::nlu::{Corpus, RelevanceModel, DEFAULT_LAMBDA};
use crate::simworld::SimConfig;

/// Environment variable overriding every seed.
pub const SEED_ENV: &str = "SCOUT_SEED";
pub const DEFAULT_SEED: u64 = 1;

/// `SCOUT_SEED` if set and parseable, else `fallback`.
pub fn seed_from_env(fallback: u64) -> u64 {
    std::env::var(SEED_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(fallback)
}

/// Everything a pipeline run depends on. Read from TOML; every field is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Bundled world name or world file path. A scenario's `world` line wins.
    pub world: String,
    pub corpus_size: usize,
    pub lambda: f64,
    /// Trained model file; when absent a model is trained from the seeded corpus.
    pub model: Option<PathBuf>,
    /// Bridge rules file; when absent the bundled rules are used.
    pub bridge_rules: Option<PathBuf>,
    pub motion: MotionProfile,
    pub sim: SimConfig,
    /// Wall-clock seconds slept per scenario think-time second on the bus.
    pub think_time_scale: f64,
    /// Longest wait for the pipeline to settle after one utterance, seconds.
    pub step_timeout: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            world: "apartment".into(),
            corpus_size: DEFAULT_CORPUS_SIZE,
            lambda: DEFAULT_LAMBDA,
            model: None,
            bridge_rules: None,
            motion: MotionProfile::default(),
            sim: SimConfig::default(),
            think_time_scale: 0.0,
            step_timeout: 60.0,
        }
    }
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Applies `SCOUT_SEED`.
    pub fn with_env(mut self) -> Self {
        self.seed = seed_from_env(self.seed);
        self
    }

    pub fn bridge_config(&self) -> Result<BridgeConfig, HarnessError> {
        match &self.bridge_rules {
            None => Ok(BridgeConfig::pipeline_default()),
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
                load_rules(&text).map_err(|e| HarnessError::Config(e.to_string()))
            }
        }
    }

    /// Loads the configured model, or trains one on the seeded corpus.
    pub fn model(&self) -> Result<RelevanceModel, HarnessError> {
        match &self.model {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
                Ok(RelevanceModel::from_text(&text)?)
            }
            None => Ok(train_model(&gen_corpus(self.seed, self.corpus_size)?, self.lambda)?),
        }
    }
}

/// Trains on every pair of `corpus`, with the no-match threshold taken from
/// cross-scoring the same pairs.
pub fn train_model(corpus: &Corpus, lambda: f64) -> Result<RelevanceModel, crate::nlu::NluError> {
    let threshold = cross_calibrate(corpus.pairs(), lambda, CALIBRATION_FOLDS)?;
    Ok(RelevanceModel::train(corpus.pairs(), lambda)?.with_threshold(threshold))
}
