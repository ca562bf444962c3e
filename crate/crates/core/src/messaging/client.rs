use std::collections::VecDeque;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use futures::{SinkExt, StreamExt};
use tokio::net::tcp::OwnedWriteHalf;
use tokio::net::TcpStream;
use tokio::sync::{mpsc, oneshot};
use tokio_util::codec::{FramedRead, FramedWrite, LinesCodec};
use tracing::{debug, warn};

use super::frame::{Frame, Op};
use super::{validate_topic, Envelope, MessagingError, Pattern};

type Pending = Arc<Mutex<VecDeque<oneshot::Sender<Frame>>>>;

struct Writer {
    sink: FramedWrite<OwnedWriteHalf, LinesCodec>,
    pending: Pending,
}

/// Publishing and subscribing side of a bus connection. Cheap to clone and
/// safe to share across tasks; requests from all clones are serialized.
#[derive(Clone)]
pub struct BusClient {
    client_id: Arc<str>,
    writer: Arc<tokio::sync::Mutex<Writer>>,
}

/// Envelopes delivered to a connection, in broker order.
pub struct Inbox {
    rx: mpsc::UnboundedReceiver<Envelope>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subscription {
    pub client_id: String,
    pub pattern: Pattern,
}

impl BusClient {
    /// Connects and announces `client_id`.
    pub async fn connect(
        addr: SocketAddr,
        client_id: &str,
    ) -> Result<(BusClient, Inbox), MessagingError> {
        let stream = TcpStream::connect(addr)
            .await
            .map_err(|source| MessagingError::Connect { addr, source })?;
        let _ = stream.set_nodelay(true);
        let (read, write) = stream.into_split();

        let pending: Pending = Arc::default();
        let (tx, rx) = mpsc::unbounded_channel();
        tokio::spawn(read_loop(read, pending.clone(), tx, client_id.to_string()));

        let client = BusClient {
            client_id: client_id.into(),
            writer: Arc::new(tokio::sync::Mutex::new(Writer {
                sink: FramedWrite::new(write, LinesCodec::new()),
                pending,
            })),
        };
        let hello = Frame { origin: Some(client_id.to_string()), ..Frame::new(Op::Hello) };
        client.request(hello).await?;
        Ok((client, Inbox { rx }))
    }

    /// Like [`BusClient::connect`], retrying with doubling delay starting at
    /// `base_delay` for at most `attempts` tries.
    pub async fn connect_with_retry(
        addr: SocketAddr,
        client_id: &str,
        attempts: u32,
        base_delay: Duration,
    ) -> Result<(BusClient, Inbox), MessagingError> {
        let mut delay = base_delay;
        let mut last = None;
        for attempt in 1..=attempts.max(1) {
            match Self::connect(addr, client_id).await {
                Ok(c) => return Ok(c),
                Err(e) => {
                    debug!(%addr, attempt, "connect failed: {e}");
                    last = Some(e);
                }
            }
            if attempt < attempts {
                tokio::time::sleep(delay).await;
                delay = (delay * 2).min(Duration::from_secs(2));
            }
        }
        Err(last.unwrap_or(MessagingError::Closed))
    }

    pub fn client_id(&self) -> &str {
        &self.client_id
    }

    pub async fn subscribe(&self, pattern: &str) -> Result<Subscription, MessagingError> {
        let pattern = Pattern::parse(pattern)?;
        let frame = Frame { topic: Some(pattern.to_string()), ..Frame::new(Op::Sub) };
        self.request(frame).await?;
        Ok(Subscription { client_id: self.client_id.to_string(), pattern })
    }

    pub async fn unsubscribe(&self, pattern: &str) -> Result<(), MessagingError> {
        let frame = Frame { topic: Some(pattern.to_string()), ..Frame::new(Op::Unsub) };
        self.request(frame).await.map(|_| ())
    }

    /// Publishes and waits for the broker's ack. Returns the assigned sequence number.
    pub async fn publish(
        &self,
        topic: &str,
        payload: &str,
        bridge_mark: Option<&str>,
    ) -> Result<u64, MessagingError> {
        validate_topic(topic)?;
        let frame = Frame {
            topic: Some(topic.to_string()),
            payload: Some(payload.to_string()),
            bridge_mark: bridge_mark.map(str::to_string),
            ..Frame::new(Op::Pub)
        };
        let ack = self.request(frame).await?;
        ack.seq.ok_or_else(|| MessagingError::Protocol("publish ack without seq".into()))
    }

    /// Sends a raw line, bypassing client-side validation. Returns the broker's reply.
    pub async fn send_raw(&self, line: &str) -> Result<Frame, MessagingError> {
        let rx = {
            let mut w = self.writer.lock().await;
            let (tx, rx) = oneshot::channel();
            w.pending.lock().unwrap().push_back(tx);
            w.sink.send(line).await.map_err(|_| MessagingError::Closed)?;
            rx
        };
        rx.await.map_err(|_| MessagingError::Closed)
    }

    async fn request(&self, frame: Frame) -> Result<Frame, MessagingError> {
        let reply = self.send_raw(&frame.encode()).await?;
        match reply.op {
            Op::Ack => Ok(reply),
            Op::Err => Err(MessagingError::Rejected(reply.payload.unwrap_or_default())),
            other => Err(MessagingError::Protocol(format!("unexpected reply {other:?}"))),
        }
    }
}

async fn read_loop(
    read: tokio::net::tcp::OwnedReadHalf,
    pending: Pending,
    inbox: mpsc::UnboundedSender<Envelope>,
    client_id: String,
) {
    let mut lines = FramedRead::new(read, LinesCodec::new());
    while let Some(line) = lines.next().await {
        let Ok(line) = line else { break };
        let frame = match Frame::decode(&line) {
            Ok(f) => f,
            Err(e) => {
                warn!(client = %client_id, "bad frame from broker: {e}");
                continue;
            }
        };
        match frame.op {
            Op::Msg => {
                let env = Envelope {
                    topic: frame.topic.unwrap_or_default(),
                    payload: frame.payload.unwrap_or_default(),
                    origin: frame.origin,
                    bridge_mark: frame.bridge_mark,
                    seq: frame.seq.unwrap_or_default(),
                };
                // The receiver may be gone while replies are still needed.
                let _ = inbox.send(env);
            }
            Op::Ack | Op::Err => {
                if let Some(waiter) = pending.lock().unwrap().pop_front() {
                    let _ = waiter.send(frame);
                }
            }
            other => warn!(client = %client_id, "unexpected {other:?} from broker"),
        }
    }
    pending.lock().unwrap().clear();
}

impl Inbox {
    pub async fn recv(&mut self) -> Option<Envelope> {
        self.rx.recv().await
    }

    /// `None` on timeout or when the connection is gone.
    pub async fn recv_timeout(&mut self, timeout: Duration) -> Option<Envelope> {
        tokio::time::timeout(timeout, self.rx.recv()).await.ok().flatten()
    }

    pub fn try_recv(&mut self) -> Option<Envelope> {
        self.rx.try_recv().ok()
    }
}
