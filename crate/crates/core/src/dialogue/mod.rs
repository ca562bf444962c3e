//! Two-floor dialogue manager. Commander utterances are routed through the
//! hybrid classifier; RN-floor status reports become Commander feedback.

mod extract;
mod frame;
mod manager;
mod node;
mod plan;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use extract::{extract, Direction, Slots};
pub use frame::{
    Frame, FrameKind, ASK_ANGLE_LEFT, ASK_ANGLE_RIGHT, ASK_DIRECTION, ASK_DISTANCE_BACKWARD, ASK_DISTANCE_FORWARD, ASK_TURN,
};
pub use manager::{Classifier, DialogueManager, DialogueState, Turn};
pub use node::{commander_input, run_dm_node, DialogueEvent, DmNodeConfig, DmSession, DmState};
pub use plan::{compile_plan, sweep_text};

pub const DONE_TEXT: &str = "Done.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Floor {
    Commander,
    Rn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Speaker {
    Commander,
    Dm,
    Rn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    Instruction,
    FeedbackStart,
    FeedbackDone,
    Clarification,
    Negative,
    ImageNotice,
    /// Answer to a question about the robot itself; neither feedback nor a request.
    Info,
}

impl MessageKind {
    /// Floor a message of this kind may appear on.
    pub fn floor(self) -> Floor {
        match self {
            MessageKind::Instruction => Floor::Rn,
            _ => Floor::Commander,
        }
    }
}

/// One outgoing DM message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloorMessage {
    pub floor: Floor,
    pub kind: MessageKind,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
}

impl FloorMessage {
    pub fn new(kind: MessageKind, text: impl Into<String>) -> Self {
        Self { floor: kind.floor(), kind, text: text.into(), reference: None }
    }

    pub fn image_notice(reference: &str) -> Self {
        Self {
            reference: Some(reference.to_string()),
            ..Self::new(MessageKind::ImageNotice, format!("Photo {reference} sent."))
        }
    }

    pub fn is_well_formed(&self) -> bool {
        self.floor == self.kind.floor()
    }
}

/// Status of the instruction in flight, as reported on the RN floor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RnStatus {
    Started,
    Done,
    Failed { reason: String },
    Image { reference: String },
}

impl fmt::Display for RnStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RnStatus::Started => f.write_str("started"),
            RnStatus::Done => f.write_str("done"),
            RnStatus::Failed { reason } => write!(f, "failed: {reason}"),
            RnStatus::Image { reference } => write!(f, "image: {reference}"),
        }
    }
}

impl fmt::Display for Floor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Floor::Commander => "commander",
            Floor::Rn => "rn",
        })
    }
}

impl fmt::Display for Speaker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Speaker::Commander => "commander",
            Speaker::Dm => "dm",
            Speaker::Rn => "rn",
        })
    }
}

/// Positive feedback sent to the Commander when an instruction starts.
pub fn feedback_for(instruction: &str) -> &'static str {
    let lower = instruction.trim_start().to_lowercase();
    if lower.starts_with("move ") {
        "Moving..."
    } else if lower.starts_with("turn ") {
        "Turning..."
    } else if lower.starts_with("take a picture") || lower.starts_with("take a photo") {
        "Taking a photo..."
    } else {
        "Executing..."
    }
}

/// Commander-floor text for a failed instruction.
pub fn inability_text(instruction: &str, reason: &str) -> String {
    let mut chars = instruction.chars();
    let action = match chars.next() {
        Some(c) => c.to_lowercase().chain(chars).collect::<String>(),
        None => "do that".to_string(),
    };
    format!("I'm unable to {action}: {reason}.")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feedback_policy() {
        assert_eq!(feedback_for("Move backward 2 feet"), "Moving...");
        assert_eq!(feedback_for("Move forward 20 feet"), "Moving...");
        assert_eq!(feedback_for("Turn left 180 degrees"), "Turning...");
        assert_eq!(feedback_for("Take a picture"), "Taking a photo...");
        assert_eq!(feedback_for("Go to the orange cone"), "Executing...");
    }

    #[test]
    fn status_wire_form() {
        let s = serde_json::to_string(&RnStatus::Failed { reason: "blocked".into() }).unwrap();
        assert_eq!(s, r#"{"status":"failed","reason":"blocked"}"#);
        let back: RnStatus = serde_json::from_str(r#"{"status":"image","reference":"photo-0001"}"#).unwrap();
        assert_eq!(back, RnStatus::Image { reference: "photo-0001".into() });
    }

    #[test]
    fn inability_wording() {
        assert_eq!(
            inability_text("Go to the orange cone", "unsupported instruction"),
            "I'm unable to go to the orange cone: unsupported instruction."
        );
    }
}
