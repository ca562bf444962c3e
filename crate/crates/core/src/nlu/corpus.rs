use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::NluError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    /// Translates to a robot instruction.
    Actionable,
    /// Needs more information from the Commander.
    Clarify,
    /// Negative feedback; nothing the robot can do.
    Reject,
    /// A conversational answer with no robot action.
    Info,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::Actionable, Label::Clarify, Label::Reject, Label::Info];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Actionable => "actionable",
            Label::Clarify => "clarify",
            Label::Reject => "reject",
            Label::Info => "info",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = NluError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| NluError::InvalidPair(format!("unknown label {s:?}")))
    }
}

/// A Commander utterance linked to the dialogue manager's response and, for
/// actionable pairs, the instruction passed on to the robot navigator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TrainingPair {
    pub utterance: String,
    pub commander_response: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rn_instruction: Option<String>,
    pub label: Label,
}

impl TrainingPair {
    pub fn new(
        utterance: impl Into<String>,
        commander_response: impl Into<String>,
        rn_instruction: Option<String>,
        label: Label,
    ) -> Result<Self, NluError> {
        let pair = Self {
            utterance: utterance.into(),
            commander_response: commander_response.into(),
            rn_instruction,
            label,
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn actionable(utterance: &str, feedback: &str, instruction: &str) -> Self {
        Self::new(utterance, feedback, Some(instruction.to_string()), Label::Actionable)
            .expect("actionable pair with instruction")
    }

    pub fn reply(utterance: &str, response: &str, label: Label) -> Self {
        Self::new(utterance, response, None, label).expect("non-actionable pair without instruction")
    }

    pub fn validate(&self) -> Result<(), NluError> {
        if (self.label == Label::Actionable) != self.rn_instruction.is_some() {
            return Err(NluError::InvalidPair(format!(
                "{:?}: label {} requires {} rn_instruction",
                self.utterance,
                self.label,
                if self.label == Label::Actionable { "an" } else { "no" }
            )));
        }
        Ok(())
    }

    /// Identity of the response class this pair trains.
    pub fn response_id(&self) -> String {
        response_id(self.label, self.rn_instruction.as_deref(), &self.commander_response)
    }
}

pub(crate) fn response_id(label: Label, rn: Option<&str>, response: &str) -> String {
    format!("{label}|{}|{response}", rn.unwrap_or(""))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pairs: Vec<TrainingPair>,
    split_seed: u64,
}

impl Corpus {
    /// Requires at least two labels and no repeated `(utterance, rn_instruction)`.
    pub fn new(pairs: Vec<TrainingPair>, split_seed: u64) -> Result<Self, NluError> {
        if pairs.is_empty() {
            return Err(NluError::EmptyCorpus);
        }
        let mut seen = BTreeSet::new();
        for p in &pairs {
            p.validate()?;
            if !seen.insert((p.utterance.as_str(), p.rn_instruction.as_deref())) {
                return Err(NluError::InvalidCorpus(format!("duplicate row {:?}", p.utterance)));
            }
        }
        let labels: BTreeSet<Label> = pairs.iter().map(|p| p.label).collect();
        if labels.len() < 2 {
            return Err(NluError::InvalidCorpus("fewer than two labels present".into()));
        }
        Ok(Self { pairs, split_seed })
    }

    pub fn pairs(&self) -> &[TrainingPair] {
        &self.pairs
    }

    pub fn split_seed(&self) -> u64 {
        self.split_seed
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.pairs.iter().map(|p| p.label).collect()
    }

    /// Seeded shuffle, then the first `train_fraction` of rows train and the rest are held out.
    pub fn split(&self, train_fraction: f64) -> (Vec<TrainingPair>, Vec<TrainingPair>) {
        let mut rows = self.pairs.clone();
        rows.shuffle(&mut ChaCha8Rng::seed_from_u64(self.split_seed));
        let cut = ((rows.len() as f64) * train_fraction.clamp(0.0, 1.0)).round() as usize;
        let heldout = rows.split_off(cut.min(rows.len()));
        (rows, heldout)
    }

    /// One JSON record per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for p in &self.pairs {
            out.push_str(&serde_json::to_string(p).expect("pair serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str, split_seed: u64) -> Result<Self, NluError> {
        let pairs = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str::<TrainingPair>(l)
                    .map_err(|e| NluError::InvalidCorpus(format!("line {}: {e}", i + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(pairs, split_seed)
    }
}
