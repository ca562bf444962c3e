use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Instruction, NavigatorError, Verb};

pub const FEET_TO_METERS: f64 = 0.3048;

/// Velocity command held for a fixed duration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistCommand {
    /// m/s, positive is forward.
    pub linear: f64,
    /// rad/s, positive is counter-clockwise.
    pub angular: f64,
    /// Seconds.
    pub duration: f64,
}

impl TwistCommand {
    /// Exactly one of linear/angular nonzero, finite positive duration.
    pub fn is_primitive(&self) -> bool {
        (self.linear != 0.0) != (self.angular != 0.0)
            && self.duration.is_finite()
            && self.duration > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionProfile {
    /// m/s
    pub linear_speed: f64,
    /// rad/s
    pub angular_speed: f64,
}

impl Default for MotionProfile {
    fn default() -> Self {
        Self { linear_speed: 0.5, angular_speed: 0.5 }
    }
}

/// Converts a move or turn into an open-loop timed twist.
pub fn to_twist(instruction: &Instruction, profile: &MotionProfile) -> Result<TwistCommand, NavigatorError> {
    let valid = |s: f64| s.is_finite() && s > 0.0;
    if !valid(profile.linear_speed) || !valid(profile.angular_speed) {
        return Err(NavigatorError::BadProfile(*profile));
    }
    let magnitude = instruction.magnitude().unwrap_or(0) as f64;
    let twist = match instruction.verb() {
        Verb::MoveForward | Verb::MoveBackward => {
            let sign = if instruction.verb() == Verb::MoveForward { 1.0 } else { -1.0 };
            let distance = magnitude * FEET_TO_METERS;
            TwistCommand {
                linear: sign * profile.linear_speed,
                angular: 0.0,
                duration: distance / profile.linear_speed,
            }
        }
        Verb::TurnLeft | Verb::TurnRight => {
            let sign = if instruction.verb() == Verb::TurnLeft { 1.0 } else { -1.0 };
            let angle = magnitude * PI / 180.0;
            TwistCommand {
                linear: 0.0,
                angular: sign * profile.angular_speed,
                duration: angle / profile.angular_speed,
            }
        }
        Verb::TakeImage => return Err(NavigatorError::NotMotion),
    };
    Ok(twist)
}
