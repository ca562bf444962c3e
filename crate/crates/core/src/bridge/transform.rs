use std::fmt;
use std::str::FromStr;

use serde_json::{Map, Value};

use super::BridgeError;

/// Payload transformer applied by a rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transform {
    /// Bytes pass through unchanged.
    Identity,
    /// Renames top-level keys of a JSON object; other keys are kept.
    Rename(Vec<(String, String)>),
    /// Wraps a plain-text payload into `{"<field>": <text>}`.
    Wrap(String),
    /// Extracts the string field `<field>` of a JSON object as plain text.
    Unwrap(String),
}

impl Transform {
    pub fn apply(&self, payload: &str) -> Result<String, BridgeError> {
        match self {
            Transform::Identity => Ok(payload.to_string()),
            Transform::Rename(table) => {
                let Value::Object(obj) = parse(payload)? else {
                    return Err(BridgeError::Translate("rename expects a JSON object".into()));
                };
                let mut out = Map::new();
                for (key, value) in obj {
                    let key = table
                        .iter()
                        .find(|(from, _)| *from == key)
                        .map(|(_, to)| to.clone())
                        .unwrap_or(key);
                    out.insert(key, value);
                }
                Ok(Value::Object(out).to_string())
            }
            Transform::Wrap(field) => {
                let mut out = Map::new();
                out.insert(field.clone(), Value::String(payload.to_string()));
                Ok(Value::Object(out).to_string())
            }
            Transform::Unwrap(field) => match parse(payload)?.get(field) {
                Some(Value::String(s)) => Ok(s.clone()),
                _ => Err(BridgeError::Translate(format!("missing string field {field:?}"))),
            },
        }
    }
}

fn parse(payload: &str) -> Result<Value, BridgeError> {
    serde_json::from_str(payload).map_err(|e| BridgeError::Translate(format!("payload is not JSON: {e}")))
}

fn field_name(s: &str) -> Result<String, BridgeError> {
    if s.is_empty() || s.contains([',', '=']) {
        Err(BridgeError::Config(format!("bad field name {s:?}")))
    } else {
        Ok(s.to_string())
    }
}

impl FromStr for Transform {
    type Err = BridgeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, arg) = s.split_once(':').unwrap_or((s, ""));
        match (name, arg) {
            ("identity", "") => Ok(Transform::Identity),
            ("wrap", field) => Ok(Transform::Wrap(field_name(field)?)),
            ("unwrap", field) => Ok(Transform::Unwrap(field_name(field)?)),
            ("rename", table) => {
                let pairs = table
                    .split(',')
                    .map(|pair| {
                        let (from, to) = pair
                            .split_once('=')
                            .ok_or_else(|| BridgeError::Config(format!("bad rename pair {pair:?}")))?;
                        Ok((field_name(from)?, field_name(to)?))
                    })
                    .collect::<Result<Vec<_>, BridgeError>>()?;
                Ok(Transform::Rename(pairs))
            }
            _ => Err(BridgeError::Config(format!("unknown transform {s:?}"))),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Identity => f.write_str("identity"),
            Transform::Wrap(field) => write!(f, "wrap:{field}"),
            Transform::Unwrap(field) => write!(f, "unwrap:{field}"),
            Transform::Rename(pairs) => {
                f.write_str("rename:")?;
                for (i, (from, to)) in pairs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{from}={to}")?;
                }
                Ok(())
            }
        }
    }
}
