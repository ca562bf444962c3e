use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::extract::extract;
use super::frame::Frame;
use super::plan::compile_plan;
use super::{feedback_for, inability_text, Floor, FloorMessage, MessageKind, RnStatus, Speaker, DONE_TEXT};
use crate::nlu::{HybridOutput, Label, RelevanceModel};

/// Anything that can route an utterance the way the hybrid classifier does.
pub trait Classifier {
    fn hybrid_output(&self, utterance: &str) -> HybridOutput;
}

impl Classifier for RelevanceModel {
    fn hybrid_output(&self, utterance: &str) -> HybridOutput {
        RelevanceModel::hybrid_output(self, utterance)
    }
}

impl<F: Fn(&str) -> HybridOutput> Classifier for F {
    fn hybrid_output(&self, utterance: &str) -> HybridOutput {
        self(utterance)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    pub t: f64,
    pub floor: Floor,
    pub speaker: Speaker,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DialogueState {
    pub pending_clarification: Option<Frame>,
    pub last_instruction: Option<String>,
    /// Instruction sent to the RN and not yet completed.
    pub in_flight: Option<String>,
    /// Remaining primitive steps of the current plan.
    pub plan: VecDeque<String>,
    /// Commander utterances waiting for the robot to finish.
    pub queued: VecDeque<String>,
    pub turn_log: Vec<Turn>,
}

pub struct DialogueManager<C = RelevanceModel> {
    classifier: C,
    state: DialogueState,
    clock: f64,
    plan_steps: usize,
    photo_delivered: bool,
}

impl<C: Classifier> DialogueManager<C> {
    pub fn new(classifier: C) -> Self {
        Self { classifier, state: DialogueState::default(), clock: 0.0, plan_steps: 0, photo_delivered: false }
    }

    pub fn state(&self) -> &DialogueState {
        &self.state
    }

    pub fn classifier(&self) -> &C {
        &self.classifier
    }

    pub fn in_flight(&self) -> Option<&str> {
        self.state.in_flight.as_deref()
    }

    /// Logical time: the latest `t` seen.
    pub fn clock(&self) -> f64 {
        self.clock
    }

    /// No instruction in flight and nothing queued.
    pub fn is_idle(&self) -> bool {
        self.state.in_flight.is_none() && self.state.queued.is_empty()
    }

    /// Turn log as text, one `t<TAB>floor<TAB>speaker<TAB>text` line per turn.
    pub fn transcript(&self) -> String {
        self.state
            .turn_log
            .iter()
            .map(|t| format!("{:.3}\t{}\t{}\t{}\n", t.t, t.floor, t.speaker, t.text))
            .collect()
    }

    fn advance_clock(&mut self, t: f64) {
        if t > self.clock {
            self.clock = t;
        }
    }

    fn log(&mut self, floor: Floor, speaker: Speaker, text: &str) {
        self.state.turn_log.push(Turn { t: self.clock, floor, speaker, text: text.to_string() });
    }

    fn say(&mut self, message: FloorMessage) -> FloorMessage {
        self.log(message.floor, Speaker::Dm, &message.text);
        message
    }

    /// Handles one Commander utterance at time `t`. While the robot is busy
    /// the utterance is queued and handled once the current plan finishes.
    pub fn handle_commander(&mut self, utterance: &str, t: f64) -> Vec<FloorMessage> {
        self.advance_clock(t);
        if self.state.in_flight.is_some() {
            self.state.queued.push_back(utterance.to_string());
            return Vec::new();
        }
        self.process(utterance)
    }

    fn process(&mut self, utterance: &str) -> Vec<FloorMessage> {
        self.log(Floor::Commander, Speaker::Commander, utterance);
        if let Some(mut frame) = self.state.pending_clarification.take() {
            let slots = extract(utterance);
            if !slots.has_verb && frame.fill(&slots) {
                return self.resolve(frame);
            }
        }
        let out = self.classifier.hybrid_output(utterance);
        match (out.label, out.rn_instruction) {
            (Label::Actionable, Some(instruction)) => self.start_plan(&instruction),
            (Label::Clarify, _) => match Frame::for_question(&out.commander_feedback) {
                Some(mut frame) => {
                    frame.fill(&extract(utterance));
                    self.resolve(frame)
                }
                None => vec![self.say(FloorMessage::new(MessageKind::Clarification, out.commander_feedback))],
            },
            (Label::Info, _) => vec![self.say(FloorMessage::new(MessageKind::Info, out.commander_feedback))],
            _ => vec![self.say(FloorMessage::new(MessageKind::Negative, out.commander_feedback))],
        }
    }

    fn resolve(&mut self, frame: Frame) -> Vec<FloorMessage> {
        match frame.instruction() {
            Some(instruction) => self.start_plan(&instruction),
            None => {
                self.state.pending_clarification = Some(frame);
                vec![self.say(FloorMessage::new(MessageKind::Clarification, frame.question()))]
            }
        }
    }

    fn start_plan(&mut self, instruction: &str) -> Vec<FloorMessage> {
        self.state.pending_clarification = None;
        self.state.plan = compile_plan(instruction).into();
        self.plan_steps = self.state.plan.len();
        self.dispatch_next()
    }

    fn dispatch_next(&mut self) -> Vec<FloorMessage> {
        let Some(step) = self.state.plan.pop_front() else {
            return Vec::new();
        };
        self.state.in_flight = Some(step.clone());
        self.photo_delivered = false;
        self.state.last_instruction = Some(step.clone());
        let feedback = feedback_for(&step);
        vec![
            self.say(FloorMessage::new(MessageKind::Instruction, step)),
            self.say(FloorMessage::new(MessageKind::FeedbackStart, feedback)),
        ]
    }

    /// Handles a status report for the in-flight instruction at time `t`.
    /// Reports with nothing in flight are ignored.
    pub fn handle_rn_status(&mut self, status: &RnStatus, t: f64) -> Vec<FloorMessage> {
        self.advance_clock(t);
        let Some(current) = self.state.in_flight.clone() else {
            tracing::warn!(%status, "status with no instruction in flight");
            return Vec::new();
        };
        self.log(Floor::Rn, Speaker::Rn, &status.to_string());
        match status {
            RnStatus::Started => Vec::new(),
            RnStatus::Done => self.complete(),
            RnStatus::Failed { reason } => {
                self.state.in_flight = None;
                self.state.plan.clear();
                let mut out = vec![self.say(FloorMessage::new(MessageKind::Negative, inability_text(&current, reason)))];
                out.extend(self.drain_queue());
                out
            }
            RnStatus::Image { reference } => {
                self.photo_delivered = true;
                vec![self.say(FloorMessage::image_notice(reference))]
            }
        }
    }

    fn complete(&mut self) -> Vec<FloorMessage> {
        self.state.in_flight = None;
        if !self.state.plan.is_empty() {
            return self.dispatch_next();
        }
        let mut out = Vec::new();
        // A lone photo request is answered by the photo itself.
        if !(self.photo_delivered && self.plan_steps == 1) {
            out.push(self.say(FloorMessage::new(MessageKind::FeedbackDone, DONE_TEXT)));
        }
        out.extend(self.drain_queue());
        out
    }

    fn drain_queue(&mut self) -> Vec<FloorMessage> {
        let mut out = Vec::new();
        while self.state.in_flight.is_none() {
            let Some(utterance) = self.state.queued.pop_front() else {
                break;
            };
            out.extend(self.process(&utterance));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dialogue::frame::ASK_DISTANCE_FORWARD;
    use crate::dialogue::sweep_text;
    use crate::nlu::NEGATIVE_FEEDBACK;
    use proptest::prelude::*;

    fn output(label: Label, rn: Option<&str>, text: &str) -> HybridOutput {
        HybridOutput {
            rn_instruction: rn.map(str::to_string),
            commander_feedback: text.to_string(),
            confidence: -1.0,
            label,
            response_id: None,
        }
    }

    /// Keyword router standing in for a trained model.
    fn stub(utterance: &str) -> HybridOutput {
        let u = utterance.to_lowercase();
        if u == "move forward" {
            output(Label::Clarify, None, ASK_DISTANCE_FORWARD)
        } else if u.contains("3 feet") {
            output(Label::Actionable, Some("Move forward 3 feet"), "Moving...")
        } else if u.contains("turn right") {
            output(Label::Actionable, Some("Turn right 45 degrees"), "Turning...")
        } else if u.contains("see") {
            output(Label::Actionable, Some("Take a picture"), "Taking a photo...")
        } else if u.contains("sweep") {
            output(Label::Actionable, Some(&sweep_text(true, 90, 45)), "Turning...")
        } else if u.contains("cone") {
            output(Label::Actionable, Some("Go to the orange cone"), "Executing...")
        } else if u.contains("who") {
            output(Label::Info, None, "I'm a ground robot.")
        } else {
            output(Label::Reject, None, NEGATIVE_FEEDBACK)
        }
    }

    fn kinds(messages: &[FloorMessage]) -> Vec<(MessageKind, &str)> {
        messages.iter().map(|m| (m.kind, m.text.as_str())).collect()
    }

    #[test]
    fn clarification_then_merge() {
        let mut dm = DialogueManager::new(stub);
        let out = dm.handle_commander("Move forward", 0.0);
        assert_eq!(kinds(&out), [(MessageKind::Clarification, ASK_DISTANCE_FORWARD)]);
        assert!(dm.state().pending_clarification.is_some());
        let out = dm.handle_commander("um, three feet", 1.0);
        assert_eq!(
            kinds(&out),
            [(MessageKind::Instruction, "Move forward 3 feet"), (MessageKind::FeedbackStart, "Moving...")]
        );
        assert_eq!(out[0].floor, Floor::Rn);
        assert!(dm.state().pending_clarification.is_none());
        assert!(dm.handle_rn_status(&RnStatus::Started, 1.1).is_empty());
        let out = dm.handle_rn_status(&RnStatus::Done, 2.0);
        assert_eq!(kinds(&out), [(MessageKind::FeedbackDone, "Done.")]);
        assert!(dm.is_idle());
    }

    #[test]
    fn unfillable_reply_is_reclassified() {
        let mut dm = DialogueManager::new(stub);
        dm.handle_commander("move forward", 0.0);
        let out = dm.handle_commander("who are you", 0.5);
        assert_eq!(kinds(&out), [(MessageKind::Info, "I'm a ground robot.")]);
        assert!(dm.state().pending_clarification.is_none());
        // A reply with its own verb is never merged.
        dm.handle_commander("move forward", 1.0);
        let out = dm.handle_commander("turn right 45", 1.5);
        assert_eq!(out[0].text, "Turn right 45 degrees");
    }

    #[test]
    fn photo_completes_with_image() {
        let mut dm = DialogueManager::new(stub);
        let out = dm.handle_commander("what do you see", 0.0);
        assert_eq!(out[1].text, "Taking a photo...");
        let out = dm.handle_rn_status(&RnStatus::Image { reference: "photo-0001".into() }, 1.0);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].kind, MessageKind::ImageNotice);
        assert_eq!(out[0].reference.as_deref(), Some("photo-0001"));
        assert!(!dm.is_idle());
        assert!(dm.handle_rn_status(&RnStatus::Done, 1.0).is_empty());
        assert!(dm.is_idle());
    }

    #[test]
    fn failure_gives_inability_and_aborts_plan() {
        let mut dm = DialogueManager::new(stub);
        dm.handle_commander("go to the orange cone", 0.0);
        let out = dm.handle_rn_status(&RnStatus::Failed { reason: "unsupported instruction".into() }, 0.1);
        assert_eq!(kinds(&out), [(MessageKind::Negative, "I'm unable to go to the orange cone: unsupported instruction.")]);

        dm.handle_commander("sweep", 1.0);
        assert_eq!(dm.state().plan.len(), 3);
        dm.handle_rn_status(&RnStatus::Failed { reason: "blocked".into() }, 1.5);
        assert!(dm.state().plan.is_empty());
        assert!(dm.is_idle());
    }

    #[test]
    fn sweep_runs_step_by_step() {
        let mut dm = DialogueManager::new(stub);
        let mut instructions = vec![dm.handle_commander("sweep", 0.0)[0].text.clone()];
        let mut t = 0.0;
        let mut last = Vec::new();
        while let Some(current) = dm.in_flight().map(str::to_string) {
            t += 1.0;
            if current == "Take a picture" {
                let notice = dm.handle_rn_status(&RnStatus::Image { reference: format!("photo-{t}") }, t);
                assert_eq!(notice[0].kind, MessageKind::ImageNotice);
            }
            last = dm.handle_rn_status(&RnStatus::Done, t);
            instructions.extend(last.iter().filter(|m| m.kind == MessageKind::Instruction).map(|m| m.text.clone()));
        }
        assert_eq!(instructions, ["Turn left 45 degrees", "Take a picture", "Turn left 45 degrees", "Take a picture"]);
        assert_eq!(last.last().unwrap().text, DONE_TEXT);
    }

    #[test]
    fn busy_input_is_queued() {
        let mut dm = DialogueManager::new(stub);
        dm.handle_commander("3 feet", 0.0);
        assert!(dm.handle_commander("turn right", 0.5).is_empty());
        assert_eq!(dm.state().queued.len(), 1);
        let out = dm.handle_rn_status(&RnStatus::Done, 2.0);
        assert_eq!(
            kinds(&out),
            [
                (MessageKind::FeedbackDone, "Done."),
                (MessageKind::Instruction, "Turn right 45 degrees"),
                (MessageKind::FeedbackStart, "Turning..."),
            ]
        );
        // The queued utterance is logged when it is handled.
        let commander: Vec<f64> =
            dm.state().turn_log.iter().filter(|t| t.speaker == Speaker::Commander).map(|t| t.t).collect();
        assert_eq!(commander, [0.0, 2.0]);
    }

    #[test]
    fn stray_status_is_ignored() {
        let mut dm = DialogueManager::new(stub);
        assert!(dm.handle_rn_status(&RnStatus::Done, 0.0).is_empty());
        assert!(dm.state().turn_log.is_empty());
    }

    #[test]
    fn transcript_lines() {
        let mut dm = DialogueManager::new(stub);
        dm.handle_commander("zzz", 0.25);
        assert_eq!(
            dm.transcript(),
            format!("0.250\tcommander\tcommander\tzzz\n0.250\tcommander\tdm\t{NEGATIVE_FEEDBACK}\n")
        );
    }

    #[derive(Debug, Clone)]
    enum Event {
        Say(&'static str),
        Status(RnStatus),
    }

    fn event() -> impl Strategy<Value = Event> {
        prop_oneof![
            prop::sample::select(vec![
                "Move forward", "3 feet", "turn right", "what do you see", "sweep", "cone", "who", "zzz", "left", "",
            ])
            .prop_map(Event::Say),
            prop_oneof![
                Just(RnStatus::Started),
                Just(RnStatus::Done),
                Just(RnStatus::Failed { reason: "blocked".into() }),
                Just(RnStatus::Image { reference: "photo-0001".into() }),
            ]
            .prop_map(Event::Status),
        ]
    }

    fn run(events: &[(Event, f64)]) -> (DialogueManager<fn(&str) -> HybridOutput>, Vec<Vec<FloorMessage>>) {
        let mut dm = DialogueManager::new(stub as fn(&str) -> HybridOutput);
        let mut turns = Vec::new();
        for (e, t) in events {
            let busy = dm.in_flight().is_some();
            let out = match e {
                Event::Say(u) => dm.handle_commander(u, *t),
                Event::Status(s) => dm.handle_rn_status(s, *t),
            };
            assert!(dm.state().pending_clarification.is_none() || dm.state().in_flight.is_none());
            // One in flight: a new instruction only ever follows a completion.
            let sent = out.iter().filter(|m| m.kind == MessageKind::Instruction).count();
            assert!(sent <= 1);
            if busy && matches!(e, Event::Say(_)) {
                assert_eq!(sent, 0);
            }
            if sent == 1 {
                assert!(dm.in_flight().is_some() || matches!(e, Event::Status(_)));
            }
            turns.push(out);
        }
        (dm, turns)
    }

    proptest! {
        #[test]
        fn invariants_hold(events in prop::collection::vec((event(), 0.0f64..100.0), 0..60)) {
            let (dm, turns) = run(&events);
            for ((e, _), out) in events.iter().zip(&turns) {
                prop_assert!(out.iter().all(FloorMessage::is_well_formed));
                for (i, m) in out.iter().enumerate() {
                    if m.kind == MessageKind::Instruction {
                        prop_assert_eq!(out.get(i + 1).map(|n| n.kind), Some(MessageKind::FeedbackStart));
                    }
                }
                // A Commander input is handled alone; status reports may also drain the queue.
                if matches!(e, Event::Say(_)) && out.iter().any(|m| m.kind == MessageKind::Clarification) {
                    prop_assert!(out.iter().all(|m| m.floor == Floor::Commander));
                }
            }
            prop_assert!(dm.state().turn_log.windows(2).all(|w| w[0].t <= w[1].t));
            // Replay determinism.
            let (again, _) = run(&events);
            prop_assert_eq!(again.transcript(), dm.transcript());
        }
    }
}
