//! Newline-delimited JSON frames.
//!
//! Every frame is one JSON object on one line. JSON string escaping keeps
//! `\n` out of the encoded payload, so the line feed is an unambiguous
//! delimiter.

use serde::{Deserialize, Serialize};

use super::MessagingError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    /// Client -> broker: announce the client id (carried in `origin`).
    Hello,
    /// Client -> broker: subscribe to the pattern carried in `topic`.
    Sub,
    /// Client -> broker: drop a subscription.
    Unsub,
    /// Client -> broker: publish.
    Pub,
    /// Broker -> client: delivery of a published envelope.
    Msg,
    /// Broker -> client: request accepted. For `pub`, `seq` is the assigned sequence number.
    Ack,
    /// Broker -> client: request rejected, reason in `payload`.
    Err,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub op: Op,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bridge_mark: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seq: Option<u64>,
}

impl Frame {
    pub fn new(op: Op) -> Self {
        Self { op, topic: None, payload: None, origin: None, bridge_mark: None, seq: None }
    }

    pub fn ack(seq: Option<u64>) -> Self {
        Self { seq, ..Self::new(Op::Ack) }
    }

    pub fn err(reason: impl Into<String>) -> Self {
        Self { payload: Some(reason.into()), ..Self::new(Op::Err) }
    }

    /// Encodes the frame as a single line, without the trailing newline.
    pub fn encode(&self) -> String {
        serde_json::to_string(self).expect("frame serialization is infallible")
    }

    pub fn decode(line: &str) -> Result<Self, MessagingError> {
        serde_json::from_str(line).map_err(|e| MessagingError::Protocol(e.to_string()))
    }
}
