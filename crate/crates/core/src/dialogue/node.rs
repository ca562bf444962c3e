//! The dialogue manager as a dialogue-bus node, and the event stream it
//! produces. The same [`DmSession`] drives the in-process pipeline.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use tokio_util::sync::CancellationToken;
use tracing::warn;

use super::{Classifier, DialogueManager, Floor, FloorMessage, MessageKind};
use crate::messaging::{topics, BusClient, Envelope, Inbox, MessagingError, NodeHandle};
use crate::navigator::StatusReport;

/// One entry of the dialogue manager's event stream (`dm.events`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum DialogueEvent {
    /// Commander utterance as received.
    Commander { t: f64, text: String },
    /// Status report accepted for the instruction in flight.
    Status { t: f64, report: StatusReport },
    /// Message sent by the DM on either floor.
    Message { t: f64, message: FloorMessage },
}

impl DialogueEvent {
    pub fn t(&self) -> f64 {
        match self {
            DialogueEvent::Commander { t, .. } | DialogueEvent::Status { t, .. } | DialogueEvent::Message { t, .. } => *t,
        }
    }

    /// The instruction text if this event dispatches one to the robot.
    pub fn instruction(&self) -> Option<&str> {
        match self {
            DialogueEvent::Message { message, .. } if message.kind == MessageKind::Instruction => Some(&message.text),
            _ => None,
        }
    }
}

/// Published on `dm.state` after every handled input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmState {
    pub clock: f64,
    pub in_flight: Option<String>,
    pub queued: usize,
    pub pending_clarification: bool,
    /// Commander utterances received so far.
    pub commander_inputs: u64,
    pub idle: bool,
}

/// A dialogue manager that reports everything it does as [`DialogueEvent`]s.
pub struct DmSession<C> {
    dm: DialogueManager<C>,
    commander_inputs: u64,
}

impl<C: Classifier> DmSession<C> {
    pub fn new(classifier: C) -> Self {
        Self { dm: DialogueManager::new(classifier), commander_inputs: 0 }
    }

    pub fn manager(&self) -> &DialogueManager<C> {
        &self.dm
    }

    pub fn clock(&self) -> f64 {
        self.dm.clock()
    }

    /// Handles a Commander utterance; `t` defaults to the current clock.
    pub fn commander(&mut self, text: &str, t: Option<f64>) -> Vec<DialogueEvent> {
        self.commander_inputs += 1;
        let t = t.unwrap_or(self.dm.clock()).max(self.dm.clock());
        let mut events = vec![DialogueEvent::Commander { t, text: text.to_string() }];
        let out = self.dm.handle_commander(text, t);
        events.extend(self.messages(out));
        events
    }

    /// Handles a status report. Reports for anything but the instruction in
    /// flight are dropped.
    pub fn status(&mut self, report: &StatusReport) -> Vec<DialogueEvent> {
        if self.dm.in_flight() != Some(report.instruction.as_str()) {
            warn!(instruction = %report.instruction, status = %report.status, "status for an instruction not in flight");
            return Vec::new();
        }
        let t = report.sim_time.unwrap_or(self.dm.clock());
        let out = self.dm.handle_rn_status(&report.status, t);
        let mut events = vec![DialogueEvent::Status { t: self.dm.clock(), report: report.clone() }];
        events.extend(self.messages(out));
        events
    }

    fn messages(&self, out: Vec<FloorMessage>) -> impl Iterator<Item = DialogueEvent> {
        let t = self.dm.clock();
        out.into_iter().map(move |message| DialogueEvent::Message { t, message })
    }

    pub fn state(&self) -> DmState {
        let s = self.dm.state();
        DmState {
            clock: self.dm.clock(),
            in_flight: s.in_flight.clone(),
            queued: s.queued.len(),
            pending_clarification: s.pending_clarification.is_some(),
            commander_inputs: self.commander_inputs,
            idle: self.dm.is_idle(),
        }
    }
}

/// Commander input as carried on `dm.commander.in`: plain text, or
/// `{"text": ..., "t": ...}` with an explicit logical time.
pub fn commander_input(payload: &str) -> (String, Option<f64>) {
    if let Ok(Value::Object(obj)) = serde_json::from_str::<Value>(payload) {
        if let Some(Value::String(text)) = obj.get("text") {
            return (text.clone(), obj.get("t").and_then(Value::as_f64));
        }
    }
    (payload.to_string(), None)
}

#[derive(Debug, Clone, Default)]
pub struct DmNodeConfig {
    pub client_id: Option<String>,
}

/// Connects to the dialogue bus. Consumes `dm.commander.in`, `dm.rn.status` and `dm.rn.image`;
/// publishes `dm.events`, `dm.state`, Commander-floor messages on
/// `dm.commander.out` and instructions as plain text on `dm.rn.instruction`.
pub async fn run_dm_node<C>(classifier: C, dialogue: std::net::SocketAddr, config: DmNodeConfig) -> Result<NodeHandle, MessagingError>
where
    C: Classifier + Send + 'static,
{
    let id = config.client_id.unwrap_or_else(|| "dm".to_string());
    let (client, inbox) = BusClient::connect(dialogue, &id).await?;
    client.subscribe(topics::COMMANDER_IN).await?;
    client.subscribe(topics::DM_RN_STATUS).await?;
    client.subscribe(topics::DM_RN_IMAGE).await?;
    let session = DmSession::new(classifier);
    Ok(NodeHandle::spawn("dm", move |cancel| serve(client, inbox, session, cancel)))
}

async fn serve<C: Classifier>(client: BusClient, mut inbox: Inbox, mut session: DmSession<C>, cancel: CancellationToken) {
    loop {
        let env = tokio::select! {
            _ = cancel.cancelled() => break,
            env = inbox.recv() => match env {
                Some(env) => env,
                None => break,
            },
        };
        let Some(events) = handle(&mut session, &env) else { continue };
        if let Err(e) = publish(&client, &events, &session.state()).await {
            warn!("dm node: publish failed: {e}");
        }
    }
}

fn handle<C: Classifier>(session: &mut DmSession<C>, env: &Envelope) -> Option<Vec<DialogueEvent>> {
    match env.topic.as_str() {
        topics::COMMANDER_IN => {
            let (text, t) = commander_input(&env.payload);
            Some(session.commander(&text, t))
        }
        topics::DM_RN_STATUS | topics::DM_RN_IMAGE => match serde_json::from_str::<StatusReport>(&env.payload) {
            Ok(report) => Some(session.status(&report)),
            Err(e) => {
                warn!(topic = %env.topic, "dm node: bad status report: {e}");
                None
            }
        },
        other => {
            warn!(topic = other, "dm node: unexpected topic");
            None
        }
    }
}

async fn publish(client: &BusClient, events: &[DialogueEvent], state: &DmState) -> Result<(), MessagingError> {
    for event in events {
        let payload = serde_json::to_string(event).expect("json");
        client.publish(topics::DM_EVENTS, &payload, None).await?;
        if let DialogueEvent::Message { message, .. } = event {
            match message.floor {
                Floor::Rn => client.publish(topics::DM_RN_INSTRUCTION, &message.text, None).await?,
                Floor::Commander => {
                    let payload = serde_json::to_string(message).expect("json");
                    client.publish(topics::COMMANDER_OUT, &payload, None).await?
                }
            };
        }
    }
    let payload = serde_json::to_string(state).expect("json");
    client.publish(topics::DM_STATE, &payload, None).await.map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dialogue::RnStatus;
    use crate::nlu::{HybridOutput, Label};

    fn photo(_: &str) -> HybridOutput {
        HybridOutput {
            rn_instruction: Some("Take a picture".into()),
            commander_feedback: "Taking a photo...".into(),
            confidence: 0.0,
            label: Label::Actionable,
            response_id: None,
        }
    }

    #[test]
    fn input_payloads() {
        assert_eq!(commander_input("turn left"), ("turn left".into(), None));
        assert_eq!(commander_input(r#"{"text":"go","t":2.5}"#), ("go".into(), Some(2.5)));
        assert_eq!(commander_input(r#"{"x":1}"#), (r#"{"x":1}"#.into(), None));
    }

    #[test]
    fn session_events_and_mismatched_status() {
        let mut s = DmSession::new(photo as fn(&str) -> HybridOutput);
        let ev = s.commander("take a picture", Some(1.0));
        assert_eq!(ev.len(), 3);
        assert_eq!(ev[1].instruction(), Some("Take a picture"));
        assert!(!s.state().idle);

        let wrong = StatusReport::new(RnStatus::Done, "Turn left 90 degrees");
        assert!(s.status(&wrong).is_empty());

        let mut done = StatusReport::new(RnStatus::Done, "Take a picture");
        done.sim_time = Some(4.0);
        let ev = s.status(&done);
        assert_eq!(ev[0].t(), 4.0);
        assert!(s.state().idle);
        assert_eq!(s.state().commander_inputs, 1);
    }
}
