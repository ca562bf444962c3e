//! Train/evaluate pipeline over a corpus split.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::nlu::{threshold_from_rows, Corpus, NluError, RelevanceModel, TrainingPair, FILLERS};

pub const TRAIN_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub train_pairs: usize,
    pub heldout_pairs: usize,
    pub classes: usize,
    pub accuracy: f64,
    pub threshold: Option<f64>,
    /// Fraction of held-out items whose top-1 changes after one filler insertion.
    pub filler_flip_rate: f64,
}

/// Inserts one filler at a random word boundary.
pub fn insert_filler(rng: &mut impl Rng, utterance: &str) -> String {
    let mut words: Vec<&str> = utterance.split_whitespace().collect();
    let at = rng.gen_range(0..=words.len());
    words.insert(at, FILLERS.choose(rng).expect("fillers"));
    words.join(" ")
}

/// Share of `probe` items whose decided response changes when a filler is inserted.
pub fn filler_flip_rate(model: &RelevanceModel, probe: &[TrainingPair], seed: u64) -> f64 {
    if probe.is_empty() {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flips = probe
        .iter()
        .filter(|p| {
            let noisy = insert_filler(&mut rng, &p.utterance);
            model.decide(&p.utterance) != model.decide(&noisy)
        })
        .count();
    flips as f64 / probe.len() as f64
}

/// Folds used to score every training pair with a model that has not seen it.
pub const CALIBRATION_FOLDS: usize = 5;

/// No-match threshold from `folds`-fold cross-scoring of `train`.
pub fn cross_calibrate(train: &[TrainingPair], lambda: f64, folds: usize) -> Result<Option<f64>, NluError> {
    let folds = folds.clamp(2, train.len().max(2));
    let mut rows = Vec::with_capacity(train.len());
    for k in 0..folds {
        let (fit, check): (Vec<_>, Vec<_>) =
            train.iter().enumerate().partition(|(i, _)| i % folds != k);
        let fit: Vec<TrainingPair> = fit.into_iter().map(|(_, p)| p.clone()).collect();
        let check: Vec<TrainingPair> = check.into_iter().map(|(_, p)| p.clone()).collect();
        if fit.is_empty() || check.is_empty() {
            continue;
        }
        rows.extend(RelevanceModel::train(&fit, lambda)?.calibration_rows(&check));
    }
    Ok(threshold_from_rows(&rows))
}

/// Trains on the corpus's seeded split and measures accuracy and filler
/// robustness on the held-out part. The no-match threshold comes from
/// cross-scoring the training portion, so held-out items never influence
/// the model.
pub fn train_and_evaluate(corpus: &Corpus, lambda: f64) -> Result<(RelevanceModel, EvalReport), NluError> {
    let (train, heldout) = corpus.split(TRAIN_FRACTION);
    let threshold = cross_calibrate(&train, lambda, CALIBRATION_FOLDS)?;
    let model = RelevanceModel::train(&train, lambda)?.with_threshold(threshold);
    let report = EvalReport {
        train_pairs: train.len(),
        heldout_pairs: heldout.len(),
        classes: model.classes().len(),
        accuracy: model.evaluate(&heldout)?,
        threshold,
        filler_flip_rate: filler_flip_rate(&model, &heldout, corpus.split_seed()),
    };
    Ok((model, report))
}
