use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::NavigatorError;

/// Supported move distances, feet.
pub const MOVE_FEET: std::ops::RangeInclusive<u32> = 1..=10;
/// Supported turn angles, degrees.
pub const TURN_DEGREES: [u32; 4] = [45, 90, 180, 360];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verb {
    MoveForward,
    MoveBackward,
    TurnLeft,
    TurnRight,
    TakeImage,
}

impl Verb {
    pub fn is_move(self) -> bool {
        matches!(self, Verb::MoveForward | Verb::MoveBackward)
    }

    pub fn is_turn(self) -> bool {
        matches!(self, Verb::TurnLeft | Verb::TurnRight)
    }
}

/// A canonical robot directive with its metric argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Instruction {
    verb: Verb,
    magnitude: Option<u32>,
}

impl Instruction {
    /// Validates the magnitude against the supported coverage.
    pub fn new(verb: Verb, magnitude: Option<u32>) -> Result<Self, NavigatorError> {
        let ok = match (verb, magnitude) {
            (Verb::TakeImage, None) => true,
            (v, Some(feet)) if v.is_move() => MOVE_FEET.contains(&feet),
            (v, Some(deg)) if v.is_turn() => TURN_DEGREES.contains(&deg),
            _ => false,
        };
        if ok {
            Ok(Self { verb, magnitude })
        } else {
            let inst = Self { verb, magnitude };
            Err(NavigatorError::Unsupported(inst.canonical()))
        }
    }

    pub fn move_forward(feet: u32) -> Result<Self, NavigatorError> {
        Self::new(Verb::MoveForward, Some(feet))
    }

    pub fn move_backward(feet: u32) -> Result<Self, NavigatorError> {
        Self::new(Verb::MoveBackward, Some(feet))
    }

    pub fn turn_left(degrees: u32) -> Result<Self, NavigatorError> {
        Self::new(Verb::TurnLeft, Some(degrees))
    }

    pub fn turn_right(degrees: u32) -> Result<Self, NavigatorError> {
        Self::new(Verb::TurnRight, Some(degrees))
    }

    pub fn take_image() -> Self {
        Self { verb: Verb::TakeImage, magnitude: None }
    }

    pub fn verb(&self) -> Verb {
        self.verb
    }

    pub fn magnitude(&self) -> Option<u32> {
        self.magnitude
    }

    /// The lookup-table key, e.g. `Turn left 90 degrees`.
    pub fn canonical(&self) -> String {
        canonical_text(self.verb, self.magnitude)
    }
}

/// Canonical wording for any verb/magnitude, including ones outside the
/// supported coverage (which the navigator will then refuse).
pub fn canonical_text(verb: Verb, magnitude: Option<u32>) -> String {
    let n = magnitude.unwrap_or(0);
    let unit = if n == 1 { "foot" } else { "feet" };
    match verb {
        Verb::MoveForward => format!("Move forward {n} {unit}"),
        Verb::MoveBackward => format!("Move backward {n} {unit}"),
        Verb::TurnLeft => format!("Turn left {n} degrees"),
        Verb::TurnRight => format!("Turn right {n} degrees"),
        Verb::TakeImage => "Take a picture".to_string(),
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// Every instruction in the supported coverage set.
pub fn coverage() -> Vec<Instruction> {
    let mut all = Vec::new();
    for feet in MOVE_FEET {
        all.push(Instruction { verb: Verb::MoveForward, magnitude: Some(feet) });
        all.push(Instruction { verb: Verb::MoveBackward, magnitude: Some(feet) });
    }
    for deg in TURN_DEGREES {
        all.push(Instruction { verb: Verb::TurnLeft, magnitude: Some(deg) });
        all.push(Instruction { verb: Verb::TurnRight, magnitude: Some(deg) });
    }
    all.push(Instruction::take_image());
    all
}

/// Predefined instruction strings, keyed exactly as the dialogue manager sends them.
#[derive(Debug, Clone)]
pub struct LookupTable {
    entries: BTreeMap<String, Instruction>,
}

impl Default for LookupTable {
    fn default() -> Self {
        let mut entries: BTreeMap<String, Instruction> =
            coverage().into_iter().map(|i| (i.canonical(), i)).collect();
        // "1 feet" is a common spelling in transcribed wizard messages.
        for verb in [Verb::MoveForward, Verb::MoveBackward] {
            let one = Instruction { verb, magnitude: Some(1) };
            entries.insert(one.canonical().replace("1 foot", "1 feet"), one);
        }
        Self { entries }
    }
}

impl LookupTable {
    pub fn get(&self, text: &str) -> Result<Instruction, NavigatorError> {
        self.entries
            .get(text)
            .copied()
            .ok_or_else(|| NavigatorError::Unsupported(text.to_string()))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Resolves a canonical instruction string through the default table.
pub fn parse_instruction(text: &str) -> Result<Instruction, NavigatorError> {
    LookupTable::default().get(text)
}
