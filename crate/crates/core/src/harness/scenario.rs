//! Scripted Commander sessions.
//!
//! ```text
//! # comment
//! world apartment
//! say 0 Move forward
//! say 2.5 3 feet
//! expect clarification How far should I move forward?
//! expect done
//! ```
//!
//! `say <delay> <text>` waits until the pipeline is idle, then `delay`
//! seconds of think time, then sends `text`. `expect <kind> [text]` lines
//! form an ordered subsequence the run log must contain; `text` is matched
//! as a prefix.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::dialogue::{DialogueEvent, MessageKind, RnStatus};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Say {
    /// Think time, seconds.
    pub delay: f64,
    pub text: String,
}

/// What an `expect` line matches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Commander,
    Instruction,
    FeedbackStart,
    FeedbackDone,
    Clarification,
    Negative,
    ImageNotice,
    Info,
    Started,
    Done,
    Failed,
    Image,
}

impl EventKind {
    pub const ALL: [EventKind; 12] = [
        EventKind::Commander,
        EventKind::Instruction,
        EventKind::FeedbackStart,
        EventKind::FeedbackDone,
        EventKind::Clarification,
        EventKind::Negative,
        EventKind::ImageNotice,
        EventKind::Info,
        EventKind::Started,
        EventKind::Done,
        EventKind::Failed,
        EventKind::Image,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EventKind::Commander => "commander",
            EventKind::Instruction => "instruction",
            EventKind::FeedbackStart => "feedback_start",
            EventKind::FeedbackDone => "feedback_done",
            EventKind::Clarification => "clarification",
            EventKind::Negative => "negative",
            EventKind::ImageNotice => "image_notice",
            EventKind::Info => "info",
            EventKind::Started => "started",
            EventKind::Done => "done",
            EventKind::Failed => "failed",
            EventKind::Image => "image",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Kind and matchable text of a log event.
    pub fn of(event: &DialogueEvent) -> (EventKind, &str) {
        match event {
            DialogueEvent::Commander { text, .. } => (EventKind::Commander, text),
            DialogueEvent::Message { message, .. } => {
                let kind = match message.kind {
                    MessageKind::Instruction => EventKind::Instruction,
                    MessageKind::FeedbackStart => EventKind::FeedbackStart,
                    MessageKind::FeedbackDone => EventKind::FeedbackDone,
                    MessageKind::Clarification => EventKind::Clarification,
                    MessageKind::Negative => EventKind::Negative,
                    MessageKind::ImageNotice => EventKind::ImageNotice,
                    MessageKind::Info => EventKind::Info,
                };
                (kind, &message.text)
            }
            DialogueEvent::Status { report, .. } => match &report.status {
                RnStatus::Started => (EventKind::Started, &report.instruction),
                RnStatus::Done => (EventKind::Done, &report.instruction),
                RnStatus::Failed { reason } => (EventKind::Failed, reason),
                RnStatus::Image { reference } => (EventKind::Image, reference),
            },
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expect {
    pub kind: EventKind,
    pub text: Option<String>,
}

impl Expect {
    pub fn matches(&self, event: &DialogueEvent) -> bool {
        let (kind, text) = EventKind::of(event);
        kind == self.kind && self.text.as_deref().map_or(true, |want| text.starts_with(want))
    }
}

impl fmt::Display for Expect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.text {
            Some(t) => write!(f, "{} {t}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// Bundled world name or path; the config's world when absent.
    pub world: Option<String>,
    pub says: Vec<Say>,
    pub expects: Vec<Expect>,
}

pub const BUNDLED_SCENARIOS: [&str; 4] = ["figure2", "empty", "blocked", "landmark"];

impl Scenario {
    pub fn parse(name: &str, text: &str) -> Result<Self, HarnessError> {
        let mut sc = Scenario { name: name.to_string(), ..Default::default() };
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |why: &str| HarnessError::Scenario(format!("{name}:{}: {why}: {line:?}", n + 1));
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match key {
                "world" if !rest.is_empty() => sc.world = Some(rest.to_string()),
                "say" => {
                    let (delay, text) = rest.split_once(char::is_whitespace).ok_or_else(|| bad("expected delay and text"))?;
                    let delay: f64 = delay.parse().map_err(|_| bad("bad delay"))?;
                    if !(delay.is_finite() && delay >= 0.0) {
                        return Err(bad("delay must be a non-negative number"));
                    }
                    sc.says.push(Say { delay, text: text.trim().to_string() });
                }
                "expect" => {
                    let (kind, text) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                    let kind = EventKind::parse(kind).ok_or_else(|| bad("unknown event kind"))?;
                    let text = Some(text.trim()).filter(|t| !t.is_empty()).map(str::to_string);
                    sc.expects.push(Expect { kind, text });
                }
                _ => return Err(bad("unrecognized line")),
            }
        }
        Ok(sc)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(w) = &self.world {
            out.push_str(&format!("world {w}\n"));
        }
        for s in &self.says {
            out.push_str(&format!("say {} {}\n", s.delay, s.text));
        }
        for e in &self.expects {
            out.push_str(&format!("expect {e}\n"));
        }
        out
    }

    pub fn bundled(name: &str) -> Result<Self, HarnessError> {
        let text = match name {
            "figure2" => include_str!("../../assets/scenarios/figure2.scenario"),
            "empty" => include_str!("../../assets/scenarios/empty.scenario"),
            "blocked" => include_str!("../../assets/scenarios/blocked.scenario"),
            "landmark" => include_str!("../../assets/scenarios/landmark.scenario"),
            other => return Err(HarnessError::Scenario(format!("no bundled scenario named {other:?}"))),
        };
        Self::parse(name, text)
    }

    /// A bundled scenario name, or otherwise a path to a scenario file.
    pub fn resolve(name_or_path: &str) -> Result<Self, HarnessError> {
        if BUNDLED_SCENARIOS.contains(&name_or_path) {
            return Self::bundled(name_or_path);
        }
        let path = Path::new(name_or_path);
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{name_or_path}: {e}")))?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or(name_or_path);
        Self::parse(name, &text)
    }

    /// Expectations not met, in order, as an ordered subsequence of `events`.
    /// Matching stops at the first unmet one; it and all later ones are returned.
    pub fn unmet<'a>(&'a self, events: &[DialogueEvent]) -> Vec<&'a Expect> {
        let mut it = events.iter();
        for (i, e) in self.expects.iter().enumerate() {
            if !it.any(|ev| e.matches(ev)) {
                return self.expects[i..].iter().collect();
            }
        }
        Vec::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dialogue::FloorMessage;

    #[test]
    fn bundled_parse_and_round_trip() {
        for name in BUNDLED_SCENARIOS {
            let sc = Scenario::bundled(name).unwrap();
            assert_eq!(Scenario::parse(name, &sc.to_text()).unwrap(), sc);
        }
        assert!(Scenario::bundled("empty").unwrap().says.is_empty());
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(Scenario::parse("x", "say -1 hi").is_err());
        assert!(Scenario::parse("x", "say hi").is_err());
        assert!(Scenario::parse("x", "expect bogus").is_err());
        assert!(Scenario::parse("x", "dance").is_err());
    }

    #[test]
    fn ordered_subsequence() {
        let sc = Scenario::parse("x", "expect clarification How far\nexpect commander 3").unwrap();
        let msg = |text: &str| DialogueEvent::Message {
            t: 0.0,
            message: FloorMessage::new(MessageKind::Clarification, text),
        };
        let said = DialogueEvent::Commander { t: 0.0, text: "3 feet".into() };
        assert!(sc.unmet(&[msg("How far should I move forward?"), said.clone()]).is_empty());
        assert_eq!(sc.unmet(&[said, msg("How far should I move forward?")]).len(), 1);
    }
}
