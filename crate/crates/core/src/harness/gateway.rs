//! WebSocket gateway for the Commander display.
//!
//! Every server message is one text frame holding a JSON record
//! `{"type": ..., "seq": ..., "body": ...}`. `chat`, `map` and `photo`
//! records are broadcast to every client with one shared `seq`, in bus
//! order. `snapshot` and `error` records answer a single client and carry
//! the `seq` of the latest broadcast. Clients send `{"type":"command","text":...}`
//! or `{"type":"snapshot"}`.

use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use futures::{SinkExt, StreamExt};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::mpsc;
use tokio_tungstenite::tungstenite::Message;
use tokio_util::sync::CancellationToken;
use tracing::{debug, warn};

use super::HarnessError;
use crate::dialogue::{DialogueEvent, Floor};
use crate::messaging::{topics, BusClient, Envelope, NodeHandle};
use crate::simworld::{MapUpdate, OccupancyGrid, PhotoMessage, Pose};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordType {
    Chat,
    Map,
    Photo,
    Snapshot,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GatewayRecord {
    #[serde(rename = "type")]
    pub kind: RecordType,
    pub seq: u64,
    pub body: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientFrame {
    Command { text: String },
    Snapshot,
}

/// Body of a `chat` record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatTurn {
    pub t: f64,
    /// `commander` or `dm`.
    pub speaker: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<crate::dialogue::MessageKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
}

impl ChatTurn {
    /// The Commander-floor turn an event represents, if any.
    pub fn from_event(event: &DialogueEvent) -> Option<Self> {
        match event {
            DialogueEvent::Commander { t, text } => {
                Some(ChatTurn { t: *t, speaker: "commander".into(), text: text.clone(), kind: None, reference: None })
            }
            DialogueEvent::Message { t, message } if message.floor == Floor::Commander => Some(ChatTurn {
                t: *t,
                speaker: "dm".into(),
                text: message.text.clone(),
                kind: Some(message.kind),
                reference: message.reference.clone(),
            }),
            _ => None,
        }
    }
}

/// Body of a `snapshot` record: the whole map folded so far and the latest photo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotBody {
    pub map: Option<MapUpdate>,
    pub photo: Option<String>,
}

#[derive(Default)]
struct Shared {
    seq: u64,
    grid: Option<OccupancyGrid>,
    pose: Option<Pose>,
    sim_time: f64,
    photo: Option<String>,
    clients: Vec<mpsc::UnboundedSender<String>>,
}

impl Shared {
    fn broadcast(&mut self, kind: RecordType, body: Value) {
        self.seq += 1;
        let text = serde_json::to_string(&GatewayRecord { kind, seq: self.seq, body }).expect("json");
        self.clients.retain(|c| c.send(text.clone()).is_ok());
    }

    fn reply(&self, kind: RecordType, body: Value) -> String {
        serde_json::to_string(&GatewayRecord { kind, seq: self.seq, body }).expect("json")
    }

    fn snapshot(&self) -> SnapshotBody {
        let map = self.grid.as_ref().map(|g| MapUpdate {
            pose: self.pose.unwrap_or(Pose::new(0.0, 0.0, 0.0)),
            sim_time: self.sim_time,
            resolution: g.resolution,
            origin_x: g.origin_x,
            origin_y: g.origin_y,
            width: g.width,
            height: g.height,
            cells: g.snapshot(),
        });
        SnapshotBody { map, photo: self.photo.clone() }
    }
}

pub struct GatewayHandle {
    addr: SocketAddr,
    node: NodeHandle,
}

impl GatewayHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    pub async fn stop(self) {
        self.node.stop().await
    }

    pub async fn join(self) {
        self.node.join().await
    }
}

/// Binds the WebSocket endpoint and attaches to both buses. Asks the
/// simulator for its whole map on start.
pub async fn serve_gateway(bind: SocketAddr, dialogue: SocketAddr, robot: SocketAddr) -> Result<GatewayHandle, HarnessError> {
    let listener = TcpListener::bind(bind).await.map_err(|e| HarnessError::Io(format!("bind {bind}: {e}")))?;
    let addr = listener.local_addr().map_err(|e| HarnessError::Io(e.to_string()))?;
    let (dm_client, dm_inbox) = BusClient::connect(dialogue, "gateway").await?;
    dm_client.subscribe(topics::DM_EVENTS).await?;
    let (robot_client, robot_inbox) = BusClient::connect(robot, "gateway").await?;
    robot_client.subscribe(topics::UI_MAP).await?;
    robot_client.subscribe(topics::UI_PHOTO).await?;
    robot_client.publish(topics::SIM_SNAPSHOT, "{}", None).await?;

    let shared = Arc::new(Mutex::new(Shared::default()));
    let node = NodeHandle::spawn("gateway", move |cancel| async move {
        let pump = tokio::spawn(pump(dm_inbox, robot_inbox, shared.clone(), cancel.clone()));
        loop {
            tokio::select! {
                _ = cancel.cancelled() => break,
                accepted = listener.accept() => match accepted {
                    Ok((stream, peer)) => {
                        tokio::spawn(session(stream, peer, shared.clone(), dm_client.clone(), cancel.clone()));
                    }
                    Err(e) => warn!("gateway accept: {e}"),
                },
            }
        }
        let _ = pump.await;
        drop(robot_client);
    });
    Ok(GatewayHandle { addr, node })
}

// Both inboxes feed one loop, so each bus's order is kept.
async fn pump(
    mut dm: crate::messaging::Inbox,
    mut robot: crate::messaging::Inbox,
    shared: Arc<Mutex<Shared>>,
    cancel: CancellationToken,
) {
    let (mut dm_open, mut robot_open) = (true, true);
    while dm_open || robot_open {
        let env = tokio::select! {
            _ = cancel.cancelled() => break,
            env = dm.recv(), if dm_open => env.or_else(|| {
                warn!("gateway: dialogue bus closed");
                dm_open = false;
                None
            }),
            env = robot.recv(), if robot_open => env.or_else(|| {
                warn!("gateway: robot bus closed");
                robot_open = false;
                None
            }),
        };
        let Some(env) = env else { continue };
        if let Err(e) = forward(&shared, &env) {
            warn!(topic = %env.topic, "gateway: {e}");
        }
    }
}

fn forward(shared: &Mutex<Shared>, env: &Envelope) -> Result<(), serde_json::Error> {
    let mut s = shared.lock().expect("gateway state");
    match env.topic.as_str() {
        topics::DM_EVENTS => {
            let event: DialogueEvent = serde_json::from_str(&env.payload)?;
            if let Some(turn) = ChatTurn::from_event(&event) {
                s.broadcast(RecordType::Chat, serde_json::to_value(turn)?);
            }
        }
        topics::UI_MAP => {
            let update: MapUpdate = serde_json::from_str(&env.payload)?;
            update.fold_into(&mut s.grid);
            s.pose = Some(update.pose);
            s.sim_time = update.sim_time;
            s.broadcast(RecordType::Map, serde_json::to_value(update)?);
        }
        topics::UI_PHOTO => {
            let photo: PhotoMessage = serde_json::from_str(&env.payload)?;
            s.photo = Some(photo.reference.clone());
            s.broadcast(RecordType::Photo, serde_json::to_value(photo)?);
        }
        _ => {}
    }
    Ok(())
}

async fn session(stream: TcpStream, peer: SocketAddr, shared: Arc<Mutex<Shared>>, dm: BusClient, cancel: CancellationToken) {
    let ws = match tokio_tungstenite::accept_async(stream).await {
        Ok(ws) => ws,
        Err(e) => {
            debug!(%peer, "websocket handshake failed: {e}");
            return;
        }
    };
    let (mut sink, mut source) = ws.split();
    let (tx, mut rx) = mpsc::unbounded_channel::<String>();
    shared.lock().expect("gateway state").clients.push(tx.clone());

    let writer = tokio::spawn(async move {
        while let Some(text) = rx.recv().await {
            if sink.send(Message::Text(text)).await.is_err() {
                break;
            }
        }
        let _ = sink.close().await;
    });

    loop {
        let msg = tokio::select! {
            _ = cancel.cancelled() => break,
            msg = source.next() => msg,
        };
        let text = match msg {
            Some(Ok(Message::Text(text))) => text,
            Some(Ok(Message::Close(_))) | None | Some(Err(_)) => break,
            Some(Ok(_)) => continue,
        };
        let reply = match serde_json::from_str::<ClientFrame>(&text) {
            Ok(ClientFrame::Command { text }) => match dm.publish(topics::COMMANDER_IN, &text, None).await {
                Ok(_) => None,
                Err(e) => Some(Some(json!({ "message": format!("publish failed: {e}") }))),
            },
            Ok(ClientFrame::Snapshot) => Some(None),
            Err(e) => Some(Some(json!({ "message": format!("bad frame: {e}") }))),
        };
        if let Some(error) = reply {
            // Built and queued under the lock so it cannot overtake an earlier broadcast.
            let s = shared.lock().expect("gateway state");
            let record = match error {
                Some(body) => s.reply(RecordType::Error, body),
                None => s.reply(RecordType::Snapshot, serde_json::to_value(s.snapshot()).expect("json")),
            };
            let _ = tx.send(record);
        }
    }
    drop(tx);
    writer.abort();
}
