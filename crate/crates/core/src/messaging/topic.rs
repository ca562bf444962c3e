use std::fmt;

use serde::{Deserialize, Serialize};

use super::MessagingError;

/// Canonical topic names used across the pipeline.
pub mod topics {
    pub const COMMANDER_IN: &str = "dm.commander.in";
    pub const COMMANDER_OUT: &str = "dm.commander.out";
    /// Dialogue-side instruction topic, bridged to [`RN_INSTRUCTION`].
    pub const DM_RN_INSTRUCTION: &str = "dm.rn.instruction";
    /// Dialogue-side mirror of [`RN_STATUS`].
    pub const DM_RN_STATUS: &str = "dm.rn.status";
    /// Dialogue-side mirror of [`RN_IMAGE`].
    pub const DM_RN_IMAGE: &str = "dm.rn.image";
    pub const DM_EVENTS: &str = "dm.events";
    pub const DM_STATE: &str = "dm.state";

    pub const RN_INSTRUCTION: &str = "rn.instruction";
    pub const RN_STATUS: &str = "rn.status";
    pub const RN_IMAGE: &str = "rn.image";

    pub const SIM_DRIVE: &str = "sim.drive";
    pub const SIM_CAPTURE: &str = "sim.capture";
    pub const SIM_RESULT: &str = "sim.result";
    /// Asks the simulator to republish its whole map on [`UI_MAP`].
    pub const SIM_SNAPSHOT: &str = "sim.snapshot";

    pub const UI_MAP: &str = "ui.map";
    pub const UI_PHOTO: &str = "ui.photo";
}

fn valid_segment(seg: &str) -> bool {
    !seg.is_empty() && seg.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Checks `[A-Za-z0-9_]+(\.[A-Za-z0-9_]+)*`.
pub fn validate_topic(topic: &str) -> Result<(), MessagingError> {
    if topic.split('.').all(valid_segment) {
        Ok(())
    } else {
        Err(MessagingError::InvalidTopic(topic.to_string()))
    }
}

/// A subscription pattern: an exact topic, or a prefix followed by a single
/// trailing `*` segment. `a.*` matches every topic with at least one segment
/// after `a`; a bare `*` matches everything.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Pattern {
    raw: String,
    prefix: Option<String>,
}

impl Pattern {
    pub fn parse(raw: &str) -> Result<Self, MessagingError> {
        let invalid = || MessagingError::InvalidPattern(raw.to_string());
        if raw == "*" {
            return Ok(Self { raw: raw.into(), prefix: Some(String::new()) });
        }
        if let Some(head) = raw.strip_suffix(".*") {
            validate_topic(head).map_err(|_| invalid())?;
            return Ok(Self { raw: raw.into(), prefix: Some(format!("{head}.")) });
        }
        validate_topic(raw).map_err(|_| invalid())?;
        Ok(Self { raw: raw.into(), prefix: None })
    }

    pub fn matches(&self, topic: &str) -> bool {
        match &self.prefix {
            None => self.raw == topic,
            Some(prefix) => topic.len() > prefix.len() && topic.starts_with(prefix.as_str()),
        }
    }

    pub fn as_str(&self) -> &str {
        &self.raw
    }
}

impl TryFrom<String> for Pattern {
    type Error = MessagingError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Pattern::parse(&value)
    }
}

impl From<Pattern> for String {
    fn from(p: Pattern) -> String {
        p.raw
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn topic_grammar() {
        assert!(validate_topic("dm.commander.in").is_ok());
        assert!(validate_topic("rn_2.status").is_ok());
        for bad in ["", ".", "a.", ".a", "a..b", "a b", "a.*", "dm-x"] {
            assert!(validate_topic(bad).is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn wildcard_only_trailing() {
        assert!(Pattern::parse("dm.*").is_ok());
        assert!(Pattern::parse("*").is_ok());
        assert!(Pattern::parse("*.dm").is_err());
        assert!(Pattern::parse("dm.*.x").is_err());
        assert!(Pattern::parse("dm*").is_err());
    }

    #[test]
    fn matching() {
        let p = Pattern::parse("dm.*").unwrap();
        assert!(p.matches("dm.reply"));
        assert!(p.matches("dm.commander.in"));
        assert!(!p.matches("dm"));
        assert!(!p.matches("dmx.reply"));
        assert!(!p.matches("rn.cmd"));

        let exact = Pattern::parse("rn.cmd").unwrap();
        assert!(exact.matches("rn.cmd"));
        assert!(!exact.matches("dm.reply"));
        assert!(Pattern::parse("*").unwrap().matches("anything.at.all"));
    }
}
