//! Compilation of compound RN instructions into primitive steps.

use crate::navigator::{canonical_text, Verb};
use crate::nlu::tokenize;

/// Canonical text of a turn-and-photograph sweep, e.g.
/// `Turn left 180 degrees and take a picture every 45 degrees`.
pub fn sweep_text(left: bool, total: u32, step: u32) -> String {
    let dir = if left { "left" } else { "right" };
    format!("Turn {dir} {total} degrees and take a picture every {step} degrees")
}

/// Splits an RN instruction into the primitive instructions dispatched one
/// at a time. A sweep becomes alternating turn and photo steps; `a; b`
/// becomes `[a, b]`; anything else is passed through as one step and left
/// for the navigator to accept or refuse.
pub fn compile_plan(text: &str) -> Vec<String> {
    if let Some(steps) = compile_sweep(text) {
        return steps;
    }
    let steps: Vec<String> =
        text.split(';').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect();
    if steps.is_empty() {
        vec![text.to_string()]
    } else {
        steps
    }
}

fn compile_sweep(text: &str) -> Option<Vec<String>> {
    let t = tokenize(text);
    let words: Vec<&str> = t.iter().map(String::as_str).collect();
    let [turn, dir, total, degrees, "and", "take", "a", "picture", "every", step, degrees2] = words[..] else {
        return None;
    };
    if turn != "turn" || degrees != "degrees" || degrees2 != "degrees" {
        return None;
    }
    let verb = match dir {
        "left" => Verb::TurnLeft,
        "right" => Verb::TurnRight,
        _ => return None,
    };
    let total: u32 = total.parse().ok()?;
    let step: u32 = step.parse().ok()?;
    if step == 0 || total == 0 || total % step != 0 {
        return None;
    }
    let turn = canonical_text(verb, Some(step));
    let photo = canonical_text(Verb::TakeImage, None);
    Some((0..total / step).flat_map(|_| [turn.clone(), photo.clone()]).collect())
}
