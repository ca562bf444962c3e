use serde::{Deserialize, Serialize};

use super::{parse_instruction, to_twist, MotionProfile, NavigatorError, TwistCommand, Verb};
use crate::dialogue::RnStatus;
use crate::simworld::{DriveOutcome, MapUpdate, Photo, Pose, SimWorld};

/// Result of a camera request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Captured {
    pub reference: String,
    pub pose: Pose,
    pub sim_time: f64,
}

/// What the navigator needs from the simulated robot.
pub trait Simulator {
    fn drive(&mut self, twist: &TwistCommand) -> Result<DriveOutcome, NavigatorError>;
    fn capture(&mut self) -> Result<Captured, NavigatorError>;
}

impl Simulator for SimWorld {
    fn drive(&mut self, twist: &TwistCommand) -> Result<DriveOutcome, NavigatorError> {
        Ok(SimWorld::drive(self, twist, |_| {}))
    }

    fn capture(&mut self) -> Result<Captured, NavigatorError> {
        let photo = SimWorld::capture(self);
        Ok(Captured { reference: photo.reference, pose: photo.pose, sim_time: self.time() })
    }
}

/// An in-process simulator whose map updates and photos are passed on.
pub struct ObservedSim<'a> {
    pub sim: &'a mut SimWorld,
    pub on_map: &'a mut dyn FnMut(MapUpdate),
    pub on_photo: &'a mut dyn FnMut(&Photo),
}

impl Simulator for ObservedSim<'_> {
    fn drive(&mut self, twist: &TwistCommand) -> Result<DriveOutcome, NavigatorError> {
        Ok(self.sim.drive(twist, &mut *self.on_map))
    }

    fn capture(&mut self) -> Result<Captured, NavigatorError> {
        let photo = self.sim.capture();
        (self.on_photo)(&photo);
        Ok(Captured { reference: photo.reference, pose: photo.pose, sim_time: self.sim.time() })
    }
}

/// One RN-floor status message as published on `rn.status` / `rn.image`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatusReport {
    #[serde(flatten)]
    pub status: RnStatus,
    pub instruction: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pose: Option<Pose>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim_time: Option<f64>,
    /// Metres covered by a move, including a partial one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub travelled: Option<f64>,
}

impl StatusReport {
    pub fn new(status: RnStatus, instruction: &str) -> Self {
        Self { status, instruction: instruction.to_string(), pose: None, sim_time: None, travelled: None }
    }

    fn at(mut self, pose: Pose, sim_time: f64) -> Self {
        self.pose = Some(pose);
        self.sim_time = Some(sim_time);
        self
    }
}

pub const REASON_UNSUPPORTED: &str = "unsupported instruction";
pub const REASON_BLOCKED: &str = "blocked";
pub const REASON_BUSY: &str = "busy";

/// Executes one canonical instruction, reporting `started` and then `done`
/// or `failed`. Unsupported text fails without `started` and without motion.
/// Photo requests report `image` before `done`. Simulator errors are
/// reported as `failed` and also returned.
pub fn execute(
    text: &str,
    profile: &MotionProfile,
    sim: &mut dyn Simulator,
    emit: &mut dyn FnMut(StatusReport),
) -> Result<(), NavigatorError> {
    let instruction = match parse_instruction(text) {
        Ok(i) => i,
        Err(e) => {
            emit(StatusReport::new(RnStatus::Failed { reason: REASON_UNSUPPORTED.into() }, text));
            return Err(e);
        }
    };
    let fail = |e: &NavigatorError| StatusReport::new(RnStatus::Failed { reason: e.to_string() }, text);
    let result = if instruction.verb() == Verb::TakeImage {
        emit(StatusReport::new(RnStatus::Started, text));
        sim.capture().map(|shot| {
            emit(StatusReport::new(RnStatus::Image { reference: shot.reference }, text).at(shot.pose, shot.sim_time));
            emit(StatusReport::new(RnStatus::Done, text).at(shot.pose, shot.sim_time));
        })
    } else {
        let twist = to_twist(&instruction, profile)?;
        emit(StatusReport::new(RnStatus::Started, text));
        sim.drive(&twist).map(|out| {
            let status = if out.blocked {
                RnStatus::Failed { reason: format!("{REASON_BLOCKED} after {:.2} m", out.travelled) }
            } else {
                RnStatus::Done
            };
            let mut report = StatusReport::new(status, text).at(out.pose, out.sim_time);
            if instruction.verb().is_move() {
                report.travelled = Some(out.travelled);
            }
            emit(report);
        })
    };
    if let Err(e) = &result {
        emit(fail(e));
    }
    result
}
