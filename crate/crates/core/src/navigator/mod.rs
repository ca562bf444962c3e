//! Automated robot navigator: canonical instruction strings are resolved
//! through a fixed lookup table into timed twists or photo requests.

mod execute;
mod instruction;
mod node;
mod twist;

pub use instruction::{canonical_text, coverage, parse_instruction, Instruction, LookupTable, Verb, MOVE_FEET, TURN_DEGREES};
pub use execute::{execute, Captured, ObservedSim, Simulator, StatusReport, REASON_BLOCKED, REASON_BUSY, REASON_UNSUPPORTED};
pub use node::{instruction_text, run_rn_node, RemoteSim, RnNodeConfig};
pub use twist::{to_twist, MotionProfile, TwistCommand, FEET_TO_METERS};

#[derive(Debug, thiserror::Error)]
pub enum NavigatorError {
    #[error("unsupported instruction: {0:?}")]
    Unsupported(String),
    #[error("photo requests have no twist")]
    NotMotion,
    #[error("motion profile speeds must be positive: {0:?}")]
    BadProfile(MotionProfile),
    #[error("an instruction is already executing")]
    Busy,
    #[error("simulator: {0}")]
    Sim(String),
}
