use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use futures::{SinkExt, StreamExt};
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::mpsc;
use tokio::task::JoinHandle;
use bytes::BytesMut;
use tokio_util::codec::{Decoder, FramedRead, FramedWrite, LinesCodec, LinesCodecError};
use tokio_util::sync::CancellationToken;
use tokio_util::task::TaskTracker;
use tracing::{debug, warn};

use super::frame::{Frame, Op};
use super::{validate_topic, MessagingError, Pattern};

pub const DEFAULT_MAX_PAYLOAD: usize = 1 << 20;

#[derive(Debug, Clone)]
pub struct BrokerConfig {
    /// Largest accepted payload, in bytes of UTF-8.
    pub max_payload: usize,
}

impl Default for BrokerConfig {
    fn default() -> Self {
        Self { max_payload: DEFAULT_MAX_PAYLOAD }
    }
}

impl BrokerConfig {
    // JSON escaping can grow a payload up to 6x (`\u0000`), plus envelope overhead.
    fn max_line(&self) -> usize {
        self.max_payload.saturating_mul(6).saturating_add(64 * 1024)
    }
}

/// Lines codec that reports an oversized line as an item instead of ending the stream.
struct BoundedLines(LinesCodec);

enum Line {
    Text(String),
    TooLong,
}

impl Decoder for BoundedLines {
    type Item = Line;
    type Error = std::io::Error;

    fn decode(&mut self, buf: &mut BytesMut) -> Result<Option<Line>, std::io::Error> {
        match self.0.decode(buf) {
            Ok(line) => Ok(line.map(Line::Text)),
            Err(LinesCodecError::MaxLineLengthExceeded) => Ok(Some(Line::TooLong)),
            Err(LinesCodecError::Io(e)) => Err(e),
        }
    }

    fn decode_eof(&mut self, buf: &mut BytesMut) -> Result<Option<Line>, std::io::Error> {
        match self.0.decode_eof(buf) {
            Ok(line) => Ok(line.map(Line::Text)),
            Err(LinesCodecError::MaxLineLengthExceeded) => Ok(Some(Line::TooLong)),
            Err(LinesCodecError::Io(e)) => Err(e),
        }
    }
}

struct Conn {
    client_id: String,
    patterns: Vec<Pattern>,
    tx: mpsc::UnboundedSender<String>,
}

#[derive(Default)]
struct Registry {
    conns: BTreeMap<u64, Conn>,
}

/// A running broker. Dropping the handle does not stop it; call [`BrokerHandle::stop`].
pub struct BrokerHandle {
    addr: SocketAddr,
    cancel: CancellationToken,
    tracker: TaskTracker,
    accept: JoinHandle<()>,
    registry: Arc<Mutex<Registry>>,
}

impl std::fmt::Debug for BrokerHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BrokerHandle").field("addr", &self.addr).finish_non_exhaustive()
    }
}

impl BrokerHandle {
    /// Binds `addr` and starts accepting clients. Port 0 picks a free port.
    pub async fn start(addr: SocketAddr, config: BrokerConfig) -> Result<Self, MessagingError> {
        let listener = TcpListener::bind(addr)
            .await
            .map_err(|source| MessagingError::Bind { addr, source })?;
        let addr = listener.local_addr()?;
        let cancel = CancellationToken::new();
        let tracker = TaskTracker::new();
        let registry = Arc::new(Mutex::new(Registry::default()));

        let accept = tokio::spawn(accept_loop(
            listener,
            config,
            cancel.clone(),
            tracker.clone(),
            registry.clone(),
        ));
        debug!(%addr, "broker listening");
        Ok(Self { addr, cancel, tracker, accept, registry })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn connection_count(&self) -> usize {
        self.registry.lock().unwrap().conns.len()
    }

    /// Closes the listener and every client connection.
    pub async fn stop(self) {
        self.cancel.cancel();
        let _ = self.accept.await;
        self.tracker.close();
        self.tracker.wait().await;
    }
}

async fn accept_loop(
    listener: TcpListener,
    config: BrokerConfig,
    cancel: CancellationToken,
    tracker: TaskTracker,
    registry: Arc<Mutex<Registry>>,
) {
    let mut next_id = 0u64;
    loop {
        tokio::select! {
            _ = cancel.cancelled() => break,
            accepted = listener.accept() => match accepted {
                Ok((stream, peer)) => {
                    next_id += 1;
                    let _ = stream.set_nodelay(true);
                    debug!(%peer, conn = next_id, "client connected");
                    tracker.spawn(serve_conn(
                        next_id,
                        stream,
                        config.clone(),
                        cancel.clone(),
                        registry.clone(),
                    ));
                }
                Err(e) => warn!("accept failed: {e}"),
            }
        }
    }
}

async fn serve_conn(
    conn_id: u64,
    stream: TcpStream,
    config: BrokerConfig,
    cancel: CancellationToken,
    registry: Arc<Mutex<Registry>>,
) {
    let (read, write) = stream.into_split();
    let (tx, mut rx) = mpsc::unbounded_channel::<String>();
    registry.lock().unwrap().conns.insert(
        conn_id,
        Conn { client_id: format!("conn-{conn_id}"), patterns: Vec::new(), tx: tx.clone() },
    );

    let writer_cancel = cancel.clone();
    let writer = tokio::spawn(async move {
        let mut sink = FramedWrite::new(write, LinesCodec::new());
        loop {
            tokio::select! {
                _ = writer_cancel.cancelled() => break,
                line = rx.recv() => match line {
                    Some(line) => {
                        if sink.send(line).await.is_err() {
                            break;
                        }
                    }
                    None => break,
                }
            }
        }
    });

    let mut lines =
        FramedRead::new(read, BoundedLines(LinesCodec::new_with_max_length(config.max_line())));
    let mut next_seq = 0u64;
    loop {
        let line = tokio::select! {
            _ = cancel.cancelled() => break,
            line = lines.next() => line,
        };
        let reply = match line {
            None => break,
            Some(Ok(Line::TooLong)) => {
                Frame::err(format!("frame exceeds {} bytes", config.max_line()))
            }
            Some(Err(e)) => {
                debug!(conn = conn_id, "read error: {e}");
                break;
            }
            Some(Ok(Line::Text(line))) => match Frame::decode(&line) {
                Ok(frame) => handle_frame(conn_id, frame, &config, &registry, &mut next_seq),
                Err(e) => Frame::err(e.to_string()),
            },
        };
        if tx.send(reply.encode()).is_err() {
            break;
        }
    }

    registry.lock().unwrap().conns.remove(&conn_id);
    drop(tx);
    let _ = writer.await;
    debug!(conn = conn_id, "client disconnected");
}

fn handle_frame(
    conn_id: u64,
    frame: Frame,
    config: &BrokerConfig,
    registry: &Mutex<Registry>,
    next_seq: &mut u64,
) -> Frame {
    match frame.op {
        Op::Hello => {
            let Some(id) = frame.origin.filter(|s| !s.is_empty()) else {
                return Frame::err("hello requires a non-empty origin");
            };
            if let Some(conn) = registry.lock().unwrap().conns.get_mut(&conn_id) {
                conn.client_id = id;
            }
            Frame::ack(None)
        }
        Op::Sub | Op::Unsub => {
            let pattern = match frame.topic.as_deref().map(Pattern::parse) {
                Some(Ok(p)) => p,
                Some(Err(e)) => return Frame::err(e.to_string()),
                None => return Frame::err("missing pattern"),
            };
            let mut reg = registry.lock().unwrap();
            let Some(conn) = reg.conns.get_mut(&conn_id) else {
                return Frame::err("unknown connection");
            };
            if frame.op == Op::Sub {
                if !conn.patterns.contains(&pattern) {
                    conn.patterns.push(pattern);
                }
            } else {
                conn.patterns.retain(|p| p != &pattern);
            }
            Frame::ack(None)
        }
        Op::Pub => {
            let Some(topic) = frame.topic else {
                return Frame::err("missing topic");
            };
            if let Err(e) = validate_topic(&topic) {
                return Frame::err(e.to_string());
            }
            let payload = frame.payload.unwrap_or_default();
            if payload.len() > config.max_payload {
                return Frame::err(format!(
                    "payload of {} bytes exceeds limit of {}",
                    payload.len(),
                    config.max_payload
                ));
            }
            *next_seq += 1;
            let seq = *next_seq;

            // Fan-out happens under the registry lock so every subscriber sees
            // one global order for this broker.
            let reg = registry.lock().unwrap();
            let origin = reg.conns.get(&conn_id).map(|c| c.client_id.clone());
            let delivery = Frame {
                op: Op::Msg,
                topic: Some(topic.clone()),
                payload: Some(payload),
                origin,
                bridge_mark: frame.bridge_mark,
                seq: Some(seq),
            }
            .encode();
            for conn in reg.conns.values() {
                if conn.patterns.iter().any(|p| p.matches(&topic)) {
                    let _ = conn.tx.send(delivery.clone());
                }
            }
            Frame::ack(Some(seq))
        }
        Op::Msg | Op::Ack | Op::Err => Frame::err(format!("unexpected op {:?} from client", frame.op)),
    }
}
