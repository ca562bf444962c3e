//! Rule-driven translation between the dialogue bus and the robot bus.
//!
//! The bridge is a client of both brokers. Every envelope it republishes
//! carries the configured mark symbol in [`Envelope::bridge_mark`], and any
//! envelope arriving with that mark is dropped, so no message is ever
//! translated twice regardless of how the rules loop.

mod config;
mod transform;

use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use tokio::task::JoinHandle;
use tracing::{debug, warn};

use crate::messaging::{BusClient, Envelope, Inbox, MessagingError};

pub use config::{load_rules, BridgeConfig, BridgeRule, Bus, DEFAULT_MARK};
pub use transform::Transform;

#[derive(Debug, thiserror::Error)]
pub enum BridgeError {
    #[error("bridge config: {0}")]
    Config(String),
    #[error("translation failed: {0}")]
    Translate(String),
    #[error("envelope topic {actual:?} does not match rule source {expected:?}")]
    TopicMismatch { expected: String, actual: String },
    #[error(transparent)]
    Messaging(#[from] MessagingError),
}

/// Applies `rule` to `env`, producing the envelope to publish on the target bus.
pub fn translate(rule: &BridgeRule, env: &Envelope, mark: &str) -> Result<Envelope, BridgeError> {
    if env.topic != rule.source_topic {
        return Err(BridgeError::TopicMismatch {
            expected: rule.source_topic.clone(),
            actual: env.topic.clone(),
        });
    }
    Ok(Envelope {
        topic: rule.target_topic.clone(),
        payload: rule.transform.apply(&env.payload)?,
        origin: env.origin.clone(),
        bridge_mark: Some(mark.to_string()),
        seq: env.seq,
    })
}

#[derive(Debug, Default)]
pub struct BridgeStats {
    translated: AtomicU64,
    looped: AtomicU64,
    failed: AtomicU64,
}

impl BridgeStats {
    /// Envelopes translated and republished.
    pub fn translated(&self) -> u64 {
        self.translated.load(Ordering::Relaxed)
    }

    /// Envelopes dropped because they already carried the mark.
    pub fn looped(&self) -> u64 {
        self.looped.load(Ordering::Relaxed)
    }

    /// Envelopes dropped because translation or republishing failed.
    pub fn failed(&self) -> u64 {
        self.failed.load(Ordering::Relaxed)
    }
}

#[derive(Debug, Clone)]
pub struct ConnectPolicy {
    pub attempts: u32,
    pub base_delay: Duration,
}

impl Default for ConnectPolicy {
    fn default() -> Self {
        Self { attempts: 6, base_delay: Duration::from_millis(100) }
    }
}

pub struct BridgeHandle {
    stats: Arc<BridgeStats>,
    tasks: Vec<JoinHandle<()>>,
}

impl BridgeHandle {
    pub fn stats(&self) -> &BridgeStats {
        &self.stats
    }

    pub async fn stop(self) {
        for task in &self.tasks {
            task.abort();
        }
        for task in self.tasks {
            let _ = task.await;
        }
    }

    /// Resolves when both bus connections have closed.
    pub async fn join(self) {
        for task in self.tasks {
            let _ = task.await;
        }
    }
}

/// Connects to both buses, subscribes to every rule source and starts translating.
pub async fn run_bridge(
    config: BridgeConfig,
    dialogue: SocketAddr,
    robot: SocketAddr,
    policy: ConnectPolicy,
) -> Result<BridgeHandle, BridgeError> {
    let (dialogue_client, dialogue_inbox) =
        BusClient::connect_with_retry(dialogue, "bridge", policy.attempts, policy.base_delay).await?;
    let (robot_client, robot_inbox) =
        BusClient::connect_with_retry(robot, "bridge", policy.attempts, policy.base_delay).await?;

    for rule in &config.rules {
        let client = match rule.source_bus {
            Bus::Dialogue => &dialogue_client,
            Bus::Robot => &robot_client,
        };
        client.subscribe(&rule.source_topic).await?;
    }

    let config = Arc::new(config);
    let stats = Arc::new(BridgeStats::default());
    // One task per source bus keeps translations ordered per source topic.
    let tasks = vec![
        tokio::spawn(pump(Bus::Dialogue, dialogue_inbox, robot_client.clone(), config.clone(), stats.clone())),
        tokio::spawn(pump(Bus::Robot, robot_inbox, dialogue_client.clone(), config.clone(), stats.clone())),
    ];
    Ok(BridgeHandle { stats, tasks })
}

async fn pump(
    source: Bus,
    mut inbox: Inbox,
    target: BusClient,
    config: Arc<BridgeConfig>,
    stats: Arc<BridgeStats>,
) {
    while let Some(env) = inbox.recv().await {
        if env.bridge_mark.as_deref() == Some(config.mark_symbol.as_str()) {
            stats.looped.fetch_add(1, Ordering::Relaxed);
            continue;
        }
        let Some(rule) = config.rule_for(source, &env.topic) else {
            debug!(bus = %source, topic = %env.topic, "no rule, ignoring");
            continue;
        };
        let out = match translate(rule, &env, &config.mark_symbol) {
            Ok(out) => out,
            Err(e) => {
                stats.failed.fetch_add(1, Ordering::Relaxed);
                warn!(bus = %source, topic = %env.topic, "dropping message: {e}");
                continue;
            }
        };
        match target.publish(&out.topic, &out.payload, out.bridge_mark.as_deref()).await {
            Ok(_) => {
                stats.translated.fetch_add(1, Ordering::Relaxed);
            }
            Err(e) => {
                stats.failed.fetch_add(1, Ordering::Relaxed);
                warn!(bus = %source.other(), topic = %out.topic, "republish failed: {e}");
                if matches!(e, MessagingError::Closed) {
                    break;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(topic: &str, payload: &str) -> Envelope {
        Envelope { topic: topic.into(), payload: payload.into(), origin: Some("dm".into()), bridge_mark: None, seq: 4 }
    }

    #[test]
    fn translate_sets_mark_and_topic() {
        let cfg = load_rules("rule dialogue dm.rn.instruction -> robot rn.instruction identity").unwrap();
        let out = translate(&cfg.rules[0], &env("dm.rn.instruction", "Turn left 90 degrees"), "x-bridged").unwrap();
        assert_eq!(out.topic, "rn.instruction");
        assert_eq!(out.payload, "Turn left 90 degrees");
        assert_eq!(out.bridge_mark.as_deref(), Some("x-bridged"));
    }

    #[test]
    fn translate_requires_matching_topic() {
        let cfg = load_rules("rule dialogue a.b -> robot c.d identity").unwrap();
        assert!(matches!(
            translate(&cfg.rules[0], &env("a.c", "x"), "m"),
            Err(BridgeError::TopicMismatch { .. })
        ));
    }
}
