pub mod bridge;
pub mod dialogue;
pub mod harness;
pub mod messaging;
pub mod navigator;
pub mod nlu;
pub mod simworld;
