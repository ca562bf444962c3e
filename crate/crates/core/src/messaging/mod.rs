//! Topic-based publish/subscribe over TCP.
//!
//! Two independent [`BrokerHandle`]s model the dialogue-side bus and the
//! robot-side bus. Clients speak newline-delimited JSON [`frame::Frame`]s.

mod broker;
mod client;
pub mod frame;
mod node;
mod topic;

use std::net::SocketAddr;

use serde::{Deserialize, Serialize};

pub use broker::{BrokerConfig, BrokerHandle, DEFAULT_MAX_PAYLOAD};
pub use client::{BusClient, Inbox, Subscription};
pub use node::NodeHandle;
pub use topic::{topics, validate_topic, Pattern};

#[derive(Debug, thiserror::Error)]
pub enum MessagingError {
    #[error("failed to bind broker on {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to connect to {addr}: {source}")]
    Connect {
        addr: SocketAddr,
        #[source]
        source: std::io::Error,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid topic {0:?}")]
    InvalidTopic(String),
    #[error("invalid subscription pattern {0:?}")]
    InvalidPattern(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("rejected by broker: {0}")]
    Rejected(String),
    #[error("connection closed")]
    Closed,
}

/// A routed message as seen by a subscriber.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    pub topic: String,
    pub payload: String,
    /// Client id of the publishing connection.
    pub origin: Option<String>,
    /// Loop-guard symbol, passed through untouched by the broker.
    pub bridge_mark: Option<String>,
    /// Per-publisher-connection sequence number, starting at 1.
    pub seq: u64,
}
