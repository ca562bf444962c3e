//! Smoothed-unigram cross-entropy retrieval.
//!
//! Each response class gets a unigram language model over the Commander-side
//! tokens of every pair that produced it, Jelinek-Mercer smoothed against a
//! collection model:
//!
//! ```text
//! P(w|R) = (1 - lambda) * c(w,R) / |R| + lambda * P(w|C)
//! P(w|C) = (c(w,C) + 1) / (|C| + |V| + 1)        w in V
//! P(unk|C) = 1 / (|C| + |V| + 1)                  any out-of-vocabulary token
//! ```
//!
//! A query scores `sum_w q(w) ln P(w|R)` where `q` is the query's empirical
//! token distribution, i.e. the negated cross-entropy. Higher is better.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::corpus::response_id;
use super::{tokenize, Label, NluError, TrainingPair};
use crate::dialogue::feedback_for;

pub const DEFAULT_LAMBDA: f64 = 0.5;

/// Commander feedback when nothing in the model is close enough.
pub const NEGATIVE_FEEDBACK: &str = "Sorry, I didn't understand that. Could you rephrase?";

const MODEL_FORMAT: &str = "scoutbot-relevance-model";
const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseClass {
    pub id: String,
    pub label: Label,
    pub commander_response: String,
    pub rn_instruction: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ClassStats {
    /// Token index -> count.
    counts: BTreeMap<usize, u64>,
    total: u64,
    /// Number of training pairs, for the prior.
    pairs: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevanceModel {
    format: String,
    version: u32,
    lambda: f64,
    /// No-match threshold; `None` never rejects on score.
    tau: Option<f64>,
    vocabulary: Vec<String>,
    collection_counts: Vec<u64>,
    collection_total: u64,
    classes: Vec<ResponseClass>,
    stats: Vec<ClassStats>,
    #[serde(skip)]
    index: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    /// Index into [`RelevanceModel::classes`].
    pub class: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub hits: Vec<Hit>,
    /// Set when the query had no tokens and the ranking is by prior only.
    pub low_confidence: bool,
}

/// Combined routing decision for one utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridOutput {
    pub rn_instruction: Option<String>,
    pub commander_feedback: String,
    pub confidence: f64,
    /// `Reject` also covers below-threshold input.
    pub label: Label,
    /// Matched class id; the reject id for below-threshold input.
    pub response_id: Option<String>,
}

/// Orders by score descending, then id ascending, and keeps the top `k`.
pub fn rank<'a>(mut scored: Vec<(&'a str, f64)>, k: usize) -> Vec<(&'a str, f64)> {
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    scored.truncate(k);
    scored
}

impl RelevanceModel {
    /// Builds one class per distinct response. Deterministic in its inputs.
    pub fn train(pairs: &[TrainingPair], lambda: f64) -> Result<Self, NluError> {
        if pairs.is_empty() {
            return Err(NluError::EmptyCorpus);
        }
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(NluError::BadLambda(lambda));
        }
        for p in pairs {
            p.validate()?;
        }

        let tokenized: Vec<Vec<String>> = pairs.iter().map(|p| tokenize(&p.utterance)).collect();
        let vocabulary: Vec<String> = {
            let mut v: Vec<String> = tokenized.iter().flatten().cloned().collect();
            v.sort();
            v.dedup();
            v
        };
        let index: BTreeMap<String, usize> =
            vocabulary.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();

        let mut by_id: BTreeMap<String, (ResponseClass, ClassStats)> = BTreeMap::new();
        let mut collection_counts = vec![0u64; vocabulary.len()];
        for (pair, tokens) in pairs.iter().zip(&tokenized) {
            let id = pair.response_id();
            let (_, stats) = by_id.entry(id.clone()).or_insert_with(|| {
                (
                    ResponseClass {
                        id,
                        label: pair.label,
                        commander_response: pair.commander_response.clone(),
                        rn_instruction: pair.rn_instruction.clone(),
                    },
                    ClassStats { counts: BTreeMap::new(), total: 0, pairs: 0 },
                )
            });
            stats.pairs += 1;
            for t in tokens {
                let i = index[t];
                *stats.counts.entry(i).or_default() += 1;
                stats.total += 1;
                collection_counts[i] += 1;
            }
        }
        let collection_total = collection_counts.iter().sum();
        let (classes, stats) = by_id.into_values().unzip();
        Ok(Self {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            lambda,
            tau: None,
            vocabulary,
            collection_counts,
            collection_total,
            classes,
            stats,
            index,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn threshold(&self) -> Option<f64> {
        self.tau
    }

    pub fn with_threshold(mut self, tau: Option<f64>) -> Self {
        self.tau = tau;
        self
    }

    pub fn classes(&self) -> &[ResponseClass] {
        &self.classes
    }

    pub fn class(&self, i: usize) -> &ResponseClass {
        &self.classes[i]
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    fn smoothing_denominator(&self) -> f64 {
        (self.collection_total + self.vocabulary.len() as u64 + 1) as f64
    }

    /// `P(w|C)`; `None` is the out-of-vocabulary bucket.
    pub fn collection_probability(&self, token: Option<usize>) -> f64 {
        let count = token.map_or(0, |i| self.collection_counts[i]);
        (count + 1) as f64 / self.smoothing_denominator()
    }

    /// `P(w|R)` for class `class`; `None` is the out-of-vocabulary bucket.
    pub fn probability(&self, class: usize, token: Option<usize>) -> f64 {
        let stats = &self.stats[class];
        let background = self.collection_probability(token);
        if stats.total == 0 {
            return background;
        }
        let count = token.and_then(|i| stats.counts.get(&i)).copied().unwrap_or(0);
        (1.0 - self.lambda) * (count as f64 / stats.total as f64) + self.lambda * background
    }

    /// Negated cross-entropy of the query against one class.
    fn score(&self, class: usize, query: &BTreeMap<String, u64>, query_len: u64) -> f64 {
        let mut total = 0.0;
        for (token, &n) in query {
            let p = self.probability(class, self.index.get(token).copied());
            total += (n as f64 / query_len as f64) * p.ln();
        }
        total
    }

    /// Top-`k` response classes for `utterance`.
    pub fn classify(&self, utterance: &str, k: usize) -> Classification {
        let tokens = tokenize(utterance);
        let mut query: BTreeMap<String, u64> = BTreeMap::new();
        for t in &tokens {
            *query.entry(t.clone()).or_default() += 1;
        }
        let low_confidence = tokens.is_empty();
        let total_pairs: u64 = self.stats.iter().map(|s| s.pairs).sum();
        let scored: Vec<(&str, f64)> = self
            .classes
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let score = if low_confidence {
                    (self.stats[i].pairs as f64 / total_pairs as f64).ln()
                } else {
                    self.score(i, &query, tokens.len() as u64)
                };
                (c.id.as_str(), score)
            })
            .collect();
        // Classes are stored sorted by id, so ids map back by binary search.
        let hits = rank(scored, k)
            .into_iter()
            .map(|(id, score)| Hit {
                class: self.classes.binary_search_by(|c| c.id.as_str().cmp(id)).expect("known id"),
                score,
            })
            .collect();
        Classification { hits, low_confidence }
    }

    pub fn top(&self, utterance: &str) -> Option<(&ResponseClass, f64)> {
        let c = self.classify(utterance, 1);
        c.hits.first().map(|h| (&self.classes[h.class], h.score))
    }

    /// Response id the hybrid classifier settles on: the top class, or the
    /// reject response when below threshold or without tokens.
    pub fn decide(&self, utterance: &str) -> String {
        self.hybrid_output(utterance).response_id.expect("hybrid output always carries an id")
    }

    /// Routes an utterance: robot instruction plus positive feedback, a
    /// clarification or info reply, or fixed negative feedback.
    pub fn hybrid_output(&self, utterance: &str) -> HybridOutput {
        let classification = self.classify(utterance, 1);
        let top = classification.hits.first();
        let below = |score: f64| self.tau.is_some_and(|tau| score < tau);
        match top {
            Some(hit) if !classification.low_confidence && !below(hit.score) => {
                let class = &self.classes[hit.class];
                let commander_feedback = match &class.rn_instruction {
                    Some(inst) => feedback_for(inst).to_string(),
                    None => class.commander_response.clone(),
                };
                HybridOutput {
                    rn_instruction: class.rn_instruction.clone(),
                    commander_feedback,
                    confidence: hit.score,
                    label: class.label,
                    response_id: Some(class.id.clone()),
                }
            }
            _ => HybridOutput {
                rn_instruction: None,
                commander_feedback: NEGATIVE_FEEDBACK.to_string(),
                confidence: top.map_or(f64::NEG_INFINITY, |h| h.score),
                label: Label::Reject,
                response_id: Some(reject_id()),
            },
        }
    }

    /// Fraction of held-out pairs whose decided response is the gold one.
    /// Without a threshold this is plain top-1 accuracy.
    pub fn evaluate(&self, heldout: &[TrainingPair]) -> Result<f64, NluError> {
        if heldout.is_empty() {
            return Err(NluError::EmptyHeldout);
        }
        let correct = heldout.iter().filter(|p| self.decide(&p.utterance) == p.response_id()).count();
        Ok(correct as f64 / heldout.len() as f64)
    }

    /// Top score and reject flags for each pair, as input to [`threshold_from_rows`].
    pub fn calibration_rows(&self, pairs: &[TrainingPair]) -> Vec<CalibrationRow> {
        pairs
            .iter()
            .filter_map(|p| {
                let (class, score) = self.top(&p.utterance)?;
                Some(CalibrationRow {
                    score,
                    top_reject: class.label == Label::Reject,
                    gold_reject: p.label == Label::Reject,
                })
            })
            .collect()
    }

    /// Threshold maximizing reject F1 on `heldout`; see [`threshold_from_rows`].
    pub fn calibrate_threshold(&self, heldout: &[TrainingPair]) -> Option<f64> {
        threshold_from_rows(&self.calibration_rows(heldout))
    }

    pub fn to_text(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_text(text: &str) -> Result<Self, NluError> {
        let mut model: Self = serde_json::from_str(text).map_err(|e| NluError::Format(e.to_string()))?;
        if model.format != MODEL_FORMAT || model.version != MODEL_VERSION {
            return Err(NluError::Format(format!(
                "expected {MODEL_FORMAT} v{MODEL_VERSION}, found {} v{}",
                model.format, model.version
            )));
        }
        if model.collection_counts.len() != model.vocabulary.len() || model.stats.len() != model.classes.len() {
            return Err(NluError::Format("inconsistent table sizes".into()));
        }
        model.index = model.vocabulary.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(model)
    }
}

/// One scored pair used to pick the no-match threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationRow {
    pub score: f64,
    /// The top class is itself a reject response.
    pub top_reject: bool,
    pub gold_reject: bool,
}

/// Threshold maximizing F1 of the reject decision (score below threshold, or
/// a reject top class). Candidates are midpoints between consecutive
/// distinct scores; ties go to the widest gap. `None` means no score
/// threshold does better than none, or there are no reject rows.
pub fn threshold_from_rows(rows: &[CalibrationRow]) -> Option<f64> {
    if !rows.iter().any(|r| r.gold_reject) {
        return None;
    }
    let mut scores: Vec<f64> = rows.iter().map(|r| r.score).filter(|s| s.is_finite()).collect();
    scores.sort_by(f64::total_cmp);
    scores.dedup();

    let f1 = |tau: Option<f64>| {
        let (mut tp, mut fp, mut fneg) = (0u32, 0u32, 0u32);
        for r in rows {
            let predicted = tau.is_some_and(|t| r.score < t) || r.top_reject;
            match (predicted, r.gold_reject) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fneg += 1,
                _ => {}
            }
        }
        if tp == 0 {
            0.0
        } else {
            2.0 * tp as f64 / (2 * tp + fp + fneg) as f64
        }
    };
    let without = (None, f64::INFINITY, f1(None));
    scores
        .windows(2)
        .map(|w| (Some((w[0] + w[1]) / 2.0), w[1] - w[0]))
        .map(|(tau, gap)| (tau, gap, f1(tau)))
        .chain(std::iter::once(without))
        .max_by(|a, b| a.2.total_cmp(&b.2).then_with(|| a.1.total_cmp(&b.1)))
        .and_then(|(tau, _, _)| tau)
}

/// Id of the reject response, which carries the fixed negative feedback.
pub fn reject_id() -> String {
    response_id(Label::Reject, None, NEGATIVE_FEEDBACK)
}

/// `label|rn|response` id of a response, as used for ranking ties.
pub fn class_id(label: Label, rn_instruction: Option<&str>, commander_response: &str) -> String {
    response_id(label, rn_instruction, commander_response)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy() -> Vec<TrainingPair> {
        vec![
            TrainingPair::actionable("move forward 3 feet", "Moving...", "Move forward 3 feet"),
            TrainingPair::actionable("go ahead three feet", "Moving...", "Move forward 3 feet"),
            TrainingPair::actionable("turn left 90 degrees", "Turning...", "Turn left 90 degrees"),
            TrainingPair::reply("move forward", "How far should I move forward?", Label::Clarify),
            TrainingPair::reply("sing me a song", "Sorry, I can't do that.", Label::Reject),
        ]
    }

    #[test]
    fn two_pairs_two_classes() {
        let m = RelevanceModel::train(&toy()[2..4], 0.5).unwrap();
        assert_eq!(m.classes().len(), 2);
    }

    #[test]
    fn distributions_are_normalized() {
        let m = RelevanceModel::train(&toy(), 0.3).unwrap();
        for c in 0..m.classes().len() {
            let mut sum = m.probability(c, None);
            for t in 0..m.vocabulary().len() {
                let p = m.probability(c, Some(t));
                assert!(p > 0.0 && p <= 1.0);
                sum += p;
            }
            assert!((sum - 1.0).abs() < 1e-9, "class {c}: {sum}");
        }
    }

    #[test]
    fn memorizes_training_utterances() {
        let m = RelevanceModel::train(&toy(), DEFAULT_LAMBDA).unwrap();
        for p in toy() {
            assert_eq!(m.top(&p.utterance).unwrap().0.id, p.response_id(), "{}", p.utterance);
        }
    }

    #[test]
    fn duplicate_utterances_keep_both_classes() {
        let pairs = vec![
            TrainingPair::actionable("move 3", "Moving...", "Move forward 3 feet"),
            TrainingPair::actionable("move 3", "Moving...", "Move backward 3 feet"),
        ];
        let m = RelevanceModel::train(&pairs, 0.5).unwrap();
        let c = m.classify("move 3", 2);
        assert_eq!(c.hits.len(), 2);
        assert_eq!(c.hits[0].score, c.hits[1].score);
        // Tie goes to the lexicographically smaller id.
        assert_eq!(m.class(c.hits[0].class).rn_instruction.as_deref(), Some("Move backward 3 feet"));
    }

    #[test]
    fn empty_query_falls_back_to_prior() {
        let m = RelevanceModel::train(&toy(), 0.5).unwrap();
        let c = m.classify("", 3);
        assert!(c.low_confidence);
        assert_eq!(m.class(c.hits[0].class).rn_instruction.as_deref(), Some("Move forward 3 feet"));
        let out = m.hybrid_output("  ");
        assert_eq!(out.label, Label::Reject);
        assert_eq!(out.commander_feedback, NEGATIVE_FEEDBACK);
    }

    #[test]
    fn hybrid_routes_by_label_and_threshold() {
        let m = RelevanceModel::train(&toy(), 0.5).unwrap().with_threshold(Some(-4.0));
        let a = m.hybrid_output("move forward 3 feet");
        assert_eq!(a.rn_instruction.as_deref(), Some("Move forward 3 feet"));
        assert_eq!(a.commander_feedback, "Moving...");
        let c = m.hybrid_output("move forward");
        assert_eq!((c.label, c.rn_instruction.as_deref()), (Label::Clarify, None));
        assert_eq!(c.commander_feedback, "How far should I move forward?");
        let g = m.hybrid_output("zzz qqq");
        assert_eq!((g.label, g.rn_instruction.as_deref()), (Label::Reject, None));
        assert_eq!(g.commander_feedback, NEGATIVE_FEEDBACK);
    }

    #[test]
    fn training_errors() {
        assert!(matches!(RelevanceModel::train(&[], 0.5), Err(NluError::EmptyCorpus)));
        assert!(matches!(RelevanceModel::train(&toy(), 1.0), Err(NluError::BadLambda(_))));
        let m = RelevanceModel::train(&toy(), 0.5).unwrap();
        assert!(matches!(m.evaluate(&[]), Err(NluError::EmptyHeldout)));
        assert_eq!(m.evaluate(&toy()).unwrap(), 1.0);
    }

    #[test]
    fn text_round_trip_is_bitwise() {
        let m = RelevanceModel::train(&toy(), 0.37).unwrap().with_threshold(Some(-3.1234567890123));
        let back = RelevanceModel::from_text(&m.to_text()).unwrap();
        assert_eq!(back, m);
        for q in ["move three feet", "turn left", "uh what"] {
            assert_eq!(back.classify(q, 5), m.classify(q, 5));
        }
        assert!(RelevanceModel::from_text("{}").is_err());
        let wrong = m.to_text().replace("\"version\": 1", "\"version\": 9");
        assert!(RelevanceModel::from_text(&wrong).is_err());
    }

    #[test]
    fn calibration_separates_gibberish() {
        let mut train = toy();
        train.push(TrainingPair::reply("blorf zint", "Sorry, I can't do that.", Label::Reject));
        let m = RelevanceModel::train(&train, 0.5).unwrap();
        let heldout = vec![
            TrainingPair::actionable("move forward three feet", "Moving...", "Move forward 3 feet"),
            TrainingPair::actionable("turn left ninety degrees", "Turning...", "Turn left 90 degrees"),
            TrainingPair::reply("qux vorp", "Sorry, I can't do that.", Label::Reject),
            TrainingPair::reply("mimsy borogove", "Sorry, I can't do that.", Label::Reject),
        ];
        let tau = m.calibrate_threshold(&heldout).unwrap();
        let m = m.with_threshold(Some(tau));
        assert_eq!(m.hybrid_output("qux vorp").label, Label::Reject);
        assert!(m.hybrid_output("move forward three feet").rn_instruction.is_some());
        assert_eq!(m.calibrate_threshold(&heldout[..2]), None);
    }

    proptest! {
        #[test]
        fn rank_invariant_under_shift(scores in proptest::collection::vec(-1000i32..1000, 1..30), shift in -1000i32..1000) {
            let ids: Vec<String> = (0..scores.len()).map(|i| format!("c{i:02}")).collect();
            let base: Vec<(&str, f64)> = ids.iter().map(String::as_str).zip(scores.iter().map(|s| *s as f64)).collect();
            let shifted: Vec<(&str, f64)> = base.iter().map(|(id, s)| (*id, s + shift as f64)).collect();
            let a: Vec<&str> = rank(base, 10).into_iter().map(|x| x.0).collect();
            let b: Vec<&str> = rank(shifted, 10).into_iter().map(|x| x.0).collect();
            prop_assert_eq!(a, b);
        }
    }
}
