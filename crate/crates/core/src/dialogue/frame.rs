//! Partial instruction frames left open by a clarification question.

use serde::{Deserialize, Serialize};

use super::extract::{Direction, Slots};
use crate::navigator::{canonical_text, Verb};

pub const ASK_DISTANCE_FORWARD: &str = "How far should I move forward?";
pub const ASK_DISTANCE_BACKWARD: &str = "How far should I move backward?";
pub const ASK_ANGLE_LEFT: &str = "How many degrees should I turn left?";
pub const ASK_ANGLE_RIGHT: &str = "How many degrees should I turn right?";
pub const ASK_DIRECTION: &str = "Which way should I turn, left or right?";
pub const ASK_TURN: &str = "Which way should I turn, and how many degrees?";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    Move,
    Turn,
}

/// A move or turn with a possibly missing direction and magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub kind: FrameKind,
    pub direction: Option<Direction>,
    pub magnitude: Option<u32>,
}

impl Frame {
    /// The frame a clarification question leaves open, if it is one of ours.
    pub fn for_question(text: &str) -> Option<Frame> {
        let (kind, direction) = match text {
            ASK_DISTANCE_FORWARD => (FrameKind::Move, Some(Direction::Forward)),
            ASK_DISTANCE_BACKWARD => (FrameKind::Move, Some(Direction::Backward)),
            ASK_ANGLE_LEFT => (FrameKind::Turn, Some(Direction::Left)),
            ASK_ANGLE_RIGHT => (FrameKind::Turn, Some(Direction::Right)),
            ASK_DIRECTION | ASK_TURN => (FrameKind::Turn, None),
            _ => return None,
        };
        Some(Frame { kind, direction, magnitude: None })
    }

    fn accepts(&self, direction: Direction) -> bool {
        match self.kind {
            FrameKind::Move => matches!(direction, Direction::Forward | Direction::Backward),
            FrameKind::Turn => matches!(direction, Direction::Left | Direction::Right),
        }
    }

    /// Fills open holes from `slots`; returns whether anything was filled.
    pub fn fill(&mut self, slots: &Slots) -> bool {
        let mut filled = false;
        if self.magnitude.is_none() {
            if let Some(n) = slots.number {
                self.magnitude = Some(n);
                filled = true;
            }
        }
        if self.direction.is_none() {
            if let Some(d) = slots.direction.filter(|d| self.accepts(*d)) {
                self.direction = Some(d);
                filled = true;
            }
        }
        filled
    }

    pub fn is_complete(&self) -> bool {
        self.direction.is_some() && self.magnitude.is_some()
    }

    /// Canonical instruction text once complete.
    pub fn instruction(&self) -> Option<String> {
        let verb = match self.direction? {
            Direction::Forward => Verb::MoveForward,
            Direction::Backward => Verb::MoveBackward,
            Direction::Left => Verb::TurnLeft,
            Direction::Right => Verb::TurnRight,
        };
        Some(canonical_text(verb, Some(self.magnitude?)))
    }

    /// The question asking for the remaining holes.
    pub fn question(&self) -> &'static str {
        match (self.kind, self.direction, self.magnitude) {
            (FrameKind::Move, Some(Direction::Backward), _) => ASK_DISTANCE_BACKWARD,
            (FrameKind::Move, _, _) => ASK_DISTANCE_FORWARD,
            (FrameKind::Turn, Some(Direction::Left), _) => ASK_ANGLE_LEFT,
            (FrameKind::Turn, Some(Direction::Right), _) => ASK_ANGLE_RIGHT,
            (FrameKind::Turn, _, Some(_)) => ASK_DIRECTION,
            (FrameKind::Turn, _, None) => ASK_TURN,
        }
    }
}
