//! Pattern extraction of the few slots a clarification reply can fill.

use crate::nlu::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
    Left,
    Right,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Slots {
    pub number: Option<u32>,
    pub direction: Option<Direction>,
    /// The reply names an action of its own and should not be merged.
    pub has_verb: bool,
}

const VERBS: &[&str] = &[
    "move", "go", "drive", "head", "turn", "rotate", "spin", "take", "snap", "picture", "photo", "see", "stop",
];

fn unit(word: &str) -> Option<u32> {
    let n = match word {
        "zero" => 0,
        "a" | "an" | "one" => 1,
        "two" => 2,
        "three" => 3,
        "four" => 4,
        "five" => 5,
        "six" => 6,
        "seven" => 7,
        "eight" => 8,
        "nine" => 9,
        "ten" => 10,
        "eleven" => 11,
        "twelve" => 12,
        "thirteen" => 13,
        "fourteen" => 14,
        "fifteen" => 15,
        "sixteen" => 16,
        "seventeen" => 17,
        "eighteen" => 18,
        "nineteen" => 19,
        _ => return None,
    };
    Some(n)
}

fn tens(word: &str) -> Option<u32> {
    let n = match word {
        "twenty" => 20,
        "thirty" => 30,
        "forty" => 40,
        "fifty" => 50,
        "sixty" => 60,
        "seventy" => 70,
        "eighty" => 80,
        "ninety" => 90,
        _ => return None,
    };
    Some(n)
}

/// Parses a spelled-out number starting at `tokens[0]`. Handles "forty five",
/// "one hundred eighty" and the spoken "one eighty" / "three sixty".
/// Returns the value and the number of tokens consumed.
fn words_number(tokens: &[String]) -> Option<(u32, usize)> {
    let word = |i: usize| tokens.get(i).map(String::as_str).unwrap_or("");
    let tail = |i: usize| -> (u32, usize) {
        match (tens(word(i)), unit(word(i + 1))) {
            (Some(t), Some(u)) if u > 0 && u < 10 => (t + u, 2),
            (Some(t), _) => (t, 1),
            _ => match unit(word(i)) {
                Some(u) if u > 0 => (u, 1),
                _ => (0, 0),
            },
        }
    };
    if let Some(u) = unit(word(0)) {
        // "a" alone is an article, not a number, unless a unit follows.
        if word(1) == "hundred" {
            let skip = usize::from(word(2) == "and");
            let (rest, used) = tail(2 + skip);
            return Some((u * 100 + rest, 2 + skip + used));
        }
        if u > 0 && u < 10 {
            if let Some(t) = tens(word(1)) {
                let (rest, used) = tail(1);
                return Some((u * 100 + rest.max(t), 1 + used));
            }
        }
        if matches!(word(0), "a" | "an") {
            return match word(1) {
                "foot" => Some((1, 1)),
                _ => None,
            };
        }
        return Some((u, 1));
    }
    if tens(word(0)).is_some() {
        return Some(tail(0));
    }
    None
}

/// The first number, direction and verb presence in `text`.
pub fn extract(text: &str) -> Slots {
    let tokens = tokenize(text);
    let mut slots = Slots::default();
    let mut i = 0;
    while i < tokens.len() {
        let t = tokens[i].as_str();
        if VERBS.contains(&t) {
            slots.has_verb = true;
        }
        if slots.direction.is_none() {
            slots.direction = match t {
                "forward" | "forwards" | "ahead" => Some(Direction::Forward),
                "backward" | "backwards" | "back" => Some(Direction::Backward),
                "left" => Some(Direction::Left),
                "right" => Some(Direction::Right),
                _ => None,
            };
        }
        if slots.number.is_none() {
            if let Ok(n) = t.parse::<u32>() {
                slots.number = Some(n);
            } else if let Some((n, used)) = words_number(&tokens[i..]) {
                slots.number = Some(n);
                i += used;
                continue;
            }
        }
        i += 1;
    }
    slots
}
