use serde::{Deserialize, Serialize};

use super::{HarnessError, PipelineConfig, Scenario};
use crate::dialogue::{DialogueEvent, Floor};
use crate::simworld::Pose;

/// Everything one scenario run produced, with what is needed to rerun it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub seed: u64,
    pub config: PipelineConfig,
    pub scenario: Scenario,
    pub events: Vec<DialogueEvent>,
    pub final_pose: Pose,
}

impl RunLog {
    /// Expectations of the scenario the events do not satisfy, as display strings.
    pub fn failures(&self) -> Vec<String> {
        self.scenario.unmet(&self.events).into_iter().map(|e| e.to_string()).collect()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }

    /// Commander-floor turns, both directions, as `speaker: text`.
    pub fn commander_log(&self) -> Vec<String> {
        self.events
            .iter()
            .filter_map(|e| match e {
                DialogueEvent::Commander { text, .. } => Some(format!("commander: {text}")),
                DialogueEvent::Message { message, .. } if message.floor == Floor::Commander => {
                    Some(format!("dm: {}", message.text))
                }
                _ => None,
            })
            .collect()
    }

    /// Poses reported along the way, in order.
    pub fn poses(&self) -> Vec<Pose> {
        self.events
            .iter()
            .filter_map(|e| match e {
                DialogueEvent::Status { report, .. } => report.pose,
                _ => None,
            })
            .collect()
    }

    /// One line per event: `t<TAB>kind<TAB>text`.
    pub fn to_text(&self) -> String {
        self.events
            .iter()
            .map(|e| {
                let (kind, text) = super::EventKind::of(e);
                format!("{:.3}\t{kind}\t{text}\n", e.t())
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run log serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Format(e.to_string()))
    }
}
