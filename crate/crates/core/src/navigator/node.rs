//! The navigator as a robot-bus node, driving the simulator node remotely.

use std::net::SocketAddr;
use std::time::Duration;

use serde_json::Value;
use tokio::runtime::Handle;
use tokio::sync::mpsc;
use tokio_util::sync::CancellationToken;
use tracing::{debug, warn};

use super::{execute, Captured, MotionProfile, NavigatorError, Simulator, StatusReport, TwistCommand, REASON_BUSY};
use crate::dialogue::RnStatus;
use crate::messaging::{topics, BusClient, Inbox, MessagingError, NodeHandle};
use crate::simworld::{CaptureRequest, DriveOutcome, DriveRequest, SimOutcome, SimResult};

/// Instruction text from an `rn.instruction` payload: `{"command": ...}` or plain text.
pub fn instruction_text(payload: &str) -> String {
    match serde_json::from_str::<Value>(payload) {
        Ok(Value::Object(obj)) => match obj.get("command") {
            Some(Value::String(s)) => s.clone(),
            _ => payload.to_string(),
        },
        _ => payload.to_string(),
    }
}

/// Request/response access to the simulator node over `sim.*`. Blocking;
/// call only from a thread that may block.
pub struct RemoteSim {
    client: BusClient,
    inbox: Inbox,
    runtime: Handle,
    cancel: CancellationToken,
    next_id: u64,
    timeout: Duration,
}

impl RemoteSim {
    pub async fn connect(robot: SocketAddr, timeout: Duration, cancel: CancellationToken) -> Result<Self, MessagingError> {
        let (client, inbox) = BusClient::connect(robot, "rn-sim").await?;
        client.subscribe(topics::SIM_RESULT).await?;
        Ok(Self { client, inbox, runtime: Handle::current(), cancel, next_id: 1, timeout })
    }

    async fn request(&mut self, topic: &str, payload: String, id: u64) -> Result<SimOutcome, NavigatorError> {
        self.client.publish(topic, &payload, None).await.map_err(|e| NavigatorError::Sim(e.to_string()))?;
        let deadline = tokio::time::Instant::now() + self.timeout;
        loop {
            let env = tokio::select! {
                _ = self.cancel.cancelled() => return Err(NavigatorError::Sim("cancelled".into())),
                _ = tokio::time::sleep_until(deadline) => return Err(NavigatorError::Sim("simulator timed out".into())),
                env = self.inbox.recv() => env.ok_or_else(|| NavigatorError::Sim("robot bus closed".into()))?,
            };
            match serde_json::from_str::<SimResult>(&env.payload) {
                Ok(r) if r.id == id => return Ok(r.outcome),
                Ok(r) => debug!(id = r.id, "stale simulator result"),
                Err(e) => warn!("bad simulator result: {e}"),
            }
        }
    }

    fn call(&mut self, topic: &'static str, payload: impl FnOnce(u64) -> String) -> Result<SimOutcome, NavigatorError> {
        let id = self.next_id;
        self.next_id += 1;
        let body = payload(id);
        let runtime = self.runtime.clone();
        match runtime.block_on(self.request(topic, body, id))? {
            SimOutcome::Error(e) => Err(NavigatorError::Sim(e)),
            outcome => Ok(outcome),
        }
    }
}

impl Simulator for RemoteSim {
    fn drive(&mut self, twist: &TwistCommand) -> Result<DriveOutcome, NavigatorError> {
        let twist = *twist;
        match self.call(topics::SIM_DRIVE, |id| serde_json::to_string(&DriveRequest { id, twist }).expect("json"))? {
            SimOutcome::Drive(out) => Ok(out),
            other => Err(NavigatorError::Sim(format!("unexpected reply {other:?}"))),
        }
    }

    fn capture(&mut self) -> Result<Captured, NavigatorError> {
        match self.call(topics::SIM_CAPTURE, |id| serde_json::to_string(&CaptureRequest { id }).expect("json"))? {
            SimOutcome::Capture(c) => Ok(c),
            other => Err(NavigatorError::Sim(format!("unexpected reply {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RnNodeConfig {
    pub profile: MotionProfile,
    /// Longest wait for one simulator reply.
    pub sim_timeout: Duration,
}

impl Default for RnNodeConfig {
    fn default() -> Self {
        Self { profile: MotionProfile::default(), sim_timeout: Duration::from_secs(120) }
    }
}

enum Event {
    Report(StatusReport),
    Finished(Box<RemoteSim>),
}

/// Connects to the robot bus and executes `rn.instruction`s one at a time,
/// reporting on `rn.status` and `rn.image`. Instructions arriving while one
/// executes are refused with `failed(busy)`.
pub async fn run_rn_node(robot: SocketAddr, config: RnNodeConfig) -> Result<NodeHandle, MessagingError> {
    let (client, inbox) = BusClient::connect(robot, "rn").await?;
    client.subscribe(topics::RN_INSTRUCTION).await?;
    let cancel = CancellationToken::new();
    let remote = RemoteSim::connect(robot, config.sim_timeout, cancel.child_token()).await?;
    Ok(NodeHandle::with_token("rn", cancel.clone(), serve(client, inbox, remote, config, cancel)))
}

async fn serve(client: BusClient, mut inbox: Inbox, remote: RemoteSim, config: RnNodeConfig, cancel: CancellationToken) {
    let (tx, mut rx) = mpsc::unbounded_channel::<Event>();
    let mut idle_sim = Some(Box::new(remote));
    loop {
        tokio::select! {
            _ = cancel.cancelled() => break,
            event = rx.recv() => match event {
                Some(Event::Report(report)) => publish(&client, &report).await,
                Some(Event::Finished(sim)) => idle_sim = Some(sim),
                None => break,
            },
            env = inbox.recv() => {
                let Some(env) = env else { break };
                let text = instruction_text(&env.payload);
                let Some(mut sim) = idle_sim.take() else {
                    let busy = StatusReport::new(RnStatus::Failed { reason: REASON_BUSY.into() }, &text);
                    publish(&client, &busy).await;
                    continue;
                };
                let tx = tx.clone();
                let profile = config.profile;
                tokio::task::spawn_blocking(move || {
                    let mut emit = |r: StatusReport| {
                        let _ = tx.send(Event::Report(r));
                    };
                    if let Err(e) = execute(&text, &profile, sim.as_mut(), &mut emit) {
                        debug!(instruction = %text, "execution failed: {e}");
                    }
                    let _ = tx.send(Event::Finished(sim));
                });
            }
        }
    }
}

async fn publish(client: &BusClient, report: &StatusReport) {
    let topic = match report.status {
        RnStatus::Image { .. } => topics::RN_IMAGE,
        _ => topics::RN_STATUS,
    };
    let payload = serde_json::to_string(report).expect("json");
    if let Err(e) = client.publish(topic, &payload, None).await {
        warn!("rn node: publish failed: {e}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instruction_payloads() {
        assert_eq!(instruction_text(r#"{"command":"Take a picture"}"#), "Take a picture");
        assert_eq!(instruction_text("Turn left 90 degrees"), "Turn left 90 degrees");
        assert_eq!(instruction_text(r#"{"other":1}"#), r#"{"other":1}"#);
    }
}
