//! The simulator as a robot-bus node: drive and capture requests on
//! `sim.*`, map deltas and photos on `ui.*`.

use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use base64::Engine;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tokio_util::sync::CancellationToken;
use tracing::warn;

use super::{DriveOutcome, MapUpdate, Photo, Pose, SimWorld};
use crate::messaging::{topics, BusClient, Envelope, Inbox, MessagingError, NodeHandle};
use crate::navigator::{Captured, TwistCommand};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveRequest {
    pub id: u64,
    pub twist: TwistCommand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureRequest {
    pub id: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimOutcome {
    Drive(DriveOutcome),
    Capture(Captured),
    Error(String),
}

/// Reply on `sim.result`, e.g. `{"id":3,"drive":{...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub id: u64,
    #[serde(flatten)]
    pub outcome: SimOutcome,
}

/// Photo as published on `ui.photo`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotoMessage {
    pub reference: String,
    pub width: usize,
    pub height: usize,
    pub pose: Pose,
    pub sim_time: f64,
    /// Object label per image column, if any.
    pub labels: Vec<Option<String>>,
    /// Binary PGM (P5), base64.
    pub pgm_base64: String,
}

impl PhotoMessage {
    pub fn new(photo: &Photo, sim_time: f64) -> Self {
        Self {
            reference: photo.reference.clone(),
            width: photo.width(),
            height: photo.height(),
            pose: photo.pose,
            sim_time,
            labels: photo.labels.clone(),
            pgm_base64: base64::engine::general_purpose::STANDARD.encode(photo.to_pgm()),
        }
    }

    pub fn pgm(&self) -> Result<Vec<u8>, base64::DecodeError> {
        base64::engine::general_purpose::STANDARD.decode(&self.pgm_base64)
    }
}

/// Largest number of cells in one `ui.map` message. Keeps a first full
/// scan of a large world under the broker's payload limit.
pub const MAX_CELLS_PER_MESSAGE: usize = 16_384;

/// A running simulator node. The world is shared for inspection.
pub struct SimNode {
    pub handle: NodeHandle,
    pub sim: Arc<Mutex<SimWorld>>,
}

/// Connects to the robot bus and serves `sim.drive`, `sim.capture` and
/// `sim.snapshot` one request at a time.
pub async fn run_sim_node(sim: SimWorld, robot: SocketAddr) -> Result<SimNode, MessagingError> {
    let (client, inbox) = BusClient::connect(robot, "sim").await?;
    for topic in [topics::SIM_DRIVE, topics::SIM_CAPTURE, topics::SIM_SNAPSHOT] {
        client.subscribe(topic).await?;
    }
    let sim = Arc::new(Mutex::new(sim));
    let shared = sim.clone();
    let handle = NodeHandle::spawn("sim", move |cancel| serve(client, inbox, shared, cancel));
    Ok(SimNode { handle, sim })
}

async fn serve(client: BusClient, mut inbox: Inbox, sim: Arc<Mutex<SimWorld>>, cancel: CancellationToken) {
    loop {
        let env = tokio::select! {
            _ = cancel.cancelled() => break,
            env = inbox.recv() => match env {
                Some(env) => env,
                None => break,
            },
        };
        if let Err(e) = handle(&client, &sim, env).await {
            warn!("sim node: {e}");
        }
    }
}

async fn publish_json(client: &BusClient, topic: &str, value: &impl Serialize) -> Result<(), MessagingError> {
    let payload = serde_json::to_string(value).expect("serializable");
    client.publish(topic, &payload, None).await.map(|_| ())
}

// Map loss is not fatal to the request being served.
async fn publish_map(client: &BusClient, update: MapUpdate) {
    for chunk in update.chunks(MAX_CELLS_PER_MESSAGE) {
        if let Err(e) = publish_json(client, topics::UI_MAP, &chunk).await {
            warn!("sim node: map update dropped: {e}");
        }
    }
}

fn request_id(payload: &str) -> Option<u64> {
    serde_json::from_str::<Value>(payload).ok()?.get("id")?.as_u64()
}

async fn handle(client: &BusClient, sim: &Arc<Mutex<SimWorld>>, env: Envelope) -> Result<(), MessagingError> {
    let reply = |id, outcome| SimResult { id, outcome };
    match env.topic.as_str() {
        topics::SIM_DRIVE => {
            let req: DriveRequest = match serde_json::from_str(&env.payload) {
                Ok(r) => r,
                Err(e) => return reject(client, &env.payload, e).await,
            };
            let (tx, mut rx) = tokio::sync::mpsc::unbounded_channel::<MapUpdate>();
            let world = sim.clone();
            let job = tokio::task::spawn_blocking(move || {
                let mut sim = world.lock().expect("sim lock");
                sim.drive(&req.twist, |update| {
                    let _ = tx.send(update);
                })
            });
            while let Some(update) = rx.recv().await {
                publish_map(client, update).await;
            }
            let outcome = match job.await {
                Ok(out) => SimOutcome::Drive(out),
                Err(e) => SimOutcome::Error(format!("drive task: {e}")),
            };
            publish_json(client, topics::SIM_RESULT, &reply(req.id, outcome)).await
        }
        topics::SIM_CAPTURE => {
            let req: CaptureRequest = match serde_json::from_str(&env.payload) {
                Ok(r) => r,
                Err(e) => return reject(client, &env.payload, e).await,
            };
            let (message, captured) = {
                let mut sim = sim.lock().expect("sim lock");
                let photo = sim.capture();
                let time = sim.time();
                let captured = Captured { reference: photo.reference.clone(), pose: photo.pose, sim_time: time };
                (PhotoMessage::new(&photo, time), captured)
            };
            publish_json(client, topics::UI_PHOTO, &message).await?;
            publish_json(client, topics::SIM_RESULT, &reply(req.id, SimOutcome::Capture(captured))).await
        }
        topics::SIM_SNAPSHOT => {
            let snapshot = sim.lock().expect("sim lock").snapshot();
            publish_map(client, snapshot).await;
            Ok(())
        }
        other => {
            warn!(topic = other, "sim node: unexpected topic");
            Ok(())
        }
    }
}

async fn reject(client: &BusClient, payload: &str, e: serde_json::Error) -> Result<(), MessagingError> {
    match request_id(payload) {
        Some(id) => {
            let result = SimResult { id, outcome: SimOutcome::Error(format!("bad request: {e}")) };
            publish_json(client, topics::SIM_RESULT, &result).await
        }
        None => {
            warn!("sim node: unanswerable request: {e}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn result_wire_form() {
        let r = SimResult { id: 7, outcome: SimOutcome::Error("x".into()) };
        assert_eq!(serde_json::to_string(&r).unwrap(), r#"{"id":7,"error":"x"}"#);
        let back: SimResult = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
        assert_eq!(request_id(r#"{"id":3,"twist":null}"#), Some(3));
        assert_eq!(request_id("nope"), None);
    }
}
