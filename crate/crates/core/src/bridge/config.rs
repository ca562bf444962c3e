//! Bridge rule files.
//!
//! ```text
//! # comment
//! mark x-bridged
//! rule dialogue dm.rn.instruction -> robot rn.instruction wrap:command
//! rule robot rn.status -> dialogue dm.rn.status identity
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Fields are separated
//! by ASCII whitespace; see `docs/bridge-config.md` for the full grammar.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::messaging::validate_topic;

use super::transform::Transform;
use super::BridgeError;

pub const DEFAULT_MARK: &str = "x-bridged";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bus {
    Dialogue,
    Robot,
}

impl Bus {
    pub fn other(self) -> Bus {
        match self {
            Bus::Dialogue => Bus::Robot,
            Bus::Robot => Bus::Dialogue,
        }
    }
}

impl FromStr for Bus {
    type Err = BridgeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dialogue" => Ok(Bus::Dialogue),
            "robot" => Ok(Bus::Robot),
            other => Err(BridgeError::Config(format!("unknown bus {other:?}"))),
        }
    }
}

impl fmt::Display for Bus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bus::Dialogue => "dialogue",
            Bus::Robot => "robot",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BridgeRule {
    pub source_bus: Bus,
    pub source_topic: String,
    pub target_bus: Bus,
    pub target_topic: String,
    pub transform: Transform,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BridgeConfig {
    pub rules: Vec<BridgeRule>,
    pub mark_symbol: String,
}

impl BridgeConfig {
    /// Validates uniqueness of `(source_bus, source_topic)`, cross-bus rules
    /// and a non-empty mark.
    pub fn new(rules: Vec<BridgeRule>, mark_symbol: impl Into<String>) -> Result<Self, BridgeError> {
        let mark_symbol = mark_symbol.into();
        if mark_symbol.is_empty() || mark_symbol.chars().any(char::is_whitespace) {
            return Err(BridgeError::Config("mark symbol must be a non-empty word".into()));
        }
        let mut seen = BTreeSet::new();
        for rule in &rules {
            if rule.source_bus == rule.target_bus {
                return Err(BridgeError::Config(format!(
                    "rule {} -> {} stays on the {} bus",
                    rule.source_topic, rule.target_topic, rule.source_bus
                )));
            }
            for topic in [&rule.source_topic, &rule.target_topic] {
                validate_topic(topic).map_err(|e| BridgeError::Config(e.to_string()))?;
            }
            if !seen.insert((rule.source_bus, rule.source_topic.clone())) {
                return Err(BridgeError::Config(format!(
                    "duplicate rule for {} {}",
                    rule.source_bus, rule.source_topic
                )));
            }
        }
        Ok(Self { rules, mark_symbol })
    }

    pub fn rule_for(&self, bus: Bus, topic: &str) -> Option<&BridgeRule> {
        self.rules.iter().find(|r| r.source_bus == bus && r.source_topic == topic)
    }

    /// The rule set the pipeline uses between the dialogue manager and the navigator.
    pub fn pipeline_default() -> Self {
        load_rules(include_str!("../../assets/bridge.rules")).expect("bundled rules are valid")
    }

    pub fn with_mark(mut self, mark: impl Into<String>) -> Result<Self, BridgeError> {
        self.mark_symbol = mark.into();
        Self::new(self.rules, self.mark_symbol)
    }
}

/// Parses and validates a rule file.
pub fn load_rules(text: &str) -> Result<BridgeConfig, BridgeError> {
    let mut rules = Vec::new();
    let mut mark = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = |msg: String| BridgeError::Config(format!("line {}: {msg}", idx + 1));
        let fields: Vec<&str> = line.split_ascii_whitespace().collect();
        match fields.as_slice() {
            ["mark", symbol] => {
                if mark.replace(symbol.to_string()).is_some() {
                    return Err(at("mark given twice".into()));
                }
            }
            ["rule", src_bus, src_topic, "->", dst_bus, dst_topic, transform] => {
                rules.push(BridgeRule {
                    source_bus: src_bus.parse().map_err(|e: BridgeError| at(e.to_string()))?,
                    source_topic: src_topic.to_string(),
                    target_bus: dst_bus.parse().map_err(|e: BridgeError| at(e.to_string()))?,
                    target_topic: dst_topic.to_string(),
                    transform: transform.parse().map_err(|e: BridgeError| at(e.to_string()))?,
                });
            }
            _ => return Err(at(format!("cannot parse {line:?}"))),
        }
    }
    BridgeConfig::new(rules, mark.unwrap_or_else(|| DEFAULT_MARK.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_identity_rule() {
        let cfg = load_rules("rule dialogue dm.rn.instruction -> robot rn.instruction identity").unwrap();
        assert_eq!(cfg.rules.len(), 1);
        assert_eq!(cfg.mark_symbol, DEFAULT_MARK);
        assert_eq!(cfg.rules[0].transform, Transform::Identity);
        assert!(cfg.rule_for(Bus::Dialogue, "dm.rn.instruction").is_some());
        assert!(cfg.rule_for(Bus::Robot, "dm.rn.instruction").is_none());
    }

    #[test]
    fn duplicate_source_rejected() {
        let text = "rule dialogue a.b -> robot c.d identity\nrule dialogue a.b -> robot e.f identity\n";
        let err = load_rules(text).unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn same_topic_on_both_buses_is_fine() {
        let text = "rule dialogue a.b -> robot a.b identity\nrule robot a.b -> dialogue a.b identity\n";
        assert_eq!(load_rules(text).unwrap().rules.len(), 2);
    }

    #[test]
    fn same_bus_rejected() {
        let err = load_rules("rule robot a.b -> robot c.d identity").unwrap_err();
        assert!(err.to_string().contains("stays on"), "{err}");
    }

    #[test]
    fn unknown_transform_rejected() {
        assert!(load_rules("rule robot a.b -> dialogue c.d uppercase").is_err());
        assert!(load_rules("rule robot a.b -> dialogue c.d rename:").is_err());
    }

    #[test]
    fn mark_and_comments() {
        let cfg = load_rules("# hi\n\nmark ros2vh\nrule robot a.b -> dialogue c.d identity\n").unwrap();
        assert_eq!(cfg.mark_symbol, "ros2vh");
        assert!(load_rules("mark a\nmark b").is_err());
        assert!(load_rules("rule robot a.b -> dialogue c.d").is_err());
        assert!(load_rules("rule robot a..b -> dialogue c.d identity").is_err());
    }

    #[test]
    fn bundled_rules_load() {
        let cfg = BridgeConfig::pipeline_default();
        assert!(cfg.rule_for(Bus::Dialogue, crate::messaging::topics::DM_RN_INSTRUCTION).is_some());
        assert!(cfg.rule_for(Bus::Robot, crate::messaging::topics::RN_STATUS).is_some());
        assert!(cfg.rule_for(Bus::Robot, crate::messaging::topics::RN_IMAGE).is_some());
    }
}
