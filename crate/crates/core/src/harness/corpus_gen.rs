//! Seeded synthetic training corpus over the navigator's coverage set.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dialogue::{
    feedback_for, sweep_text, ASK_ANGLE_LEFT, ASK_ANGLE_RIGHT, ASK_DISTANCE_BACKWARD,
    ASK_DISTANCE_FORWARD, ASK_TURN,
};
use crate::navigator::{canonical_text, Verb, MOVE_FEET, TURN_DEGREES};
use crate::nlu::{Corpus, Label, NluError, TrainingPair, FILLERS, NEGATIVE_FEEDBACK};

pub const DEFAULT_CORPUS_SIZE: usize = 1500;
pub const MIN_CORPUS_SIZE: usize = 10;
const LANDMARKS: [&str; 8] =
    ["orange cone", "couch", "table", "doorway", "desk", "plant", "dumpster", "cabinet"];

const INFO: &[(&str, &[&str])] = &[
    (
        "I can move forward or backward up to 10 feet, turn 45, 90, 180 or 360 degrees, and take pictures.",
        &["what can you do", "list your abilities", "which commands do you understand", "help", "how do i use you"],
    ),
    (
        "I'm ScoutBot, a ground robot exploring the area.",
        &["who are you", "tell me your name", "introduce yourself", "who am i talking to"],
    ),
    (
        "The map on your display shows everything I've scanned so far.",
        &["where are you", "where are you now", "where are you located", "show me the map"],
    ),
    (
        "Yes, I'm here and ready.",
        &["are you there", "can you hear me", "hello", "hi robot", "are you ready"],
    ),
    (
        "My battery is fine.",
        &["how is your battery", "check your battery", "are you low on power"],
    ),
];

const REJECT: &[&str] = &[
    "pick up the box", "open the door", "climb the stairs", "fly over the wall", "jump over it",
    "sing a song", "make me a sandwich", "go upstairs", "knock on the door", "grab the bottle",
    "push the chair", "dance for me", "close the window", "turn on the lights", "follow that person",
    "call for backup", "unlock the cabinet", "lift the table", "tell me a joke", "wave your arm",
];

fn number_word(n: u32) -> &'static str {
    match n {
        1 => "one",
        2 => "two",
        3 => "three",
        4 => "four",
        5 => "five",
        6 => "six",
        7 => "seven",
        8 => "eight",
        9 => "nine",
        10 => "ten",
        45 => "forty five",
        90 => "ninety",
        180 => "one eighty",
        360 => "three sixty",
        _ => unreachable!("no word form for {n}"),
    }
}

fn pick<'a>(rng: &mut ChaCha8Rng, options: &[&'a str]) -> &'a str {
    options.choose(rng).copied().expect("non-empty options")
}

fn number(rng: &mut ChaCha8Rng, n: u32) -> String {
    if rng.gen_bool(0.5) {
        n.to_string()
    } else {
        number_word(n).to_string()
    }
}

fn politeness(rng: &mut ChaCha8Rng, core: String) -> String {
    let prefix = pick(rng, &["", "", "", "", "", "", "please ", "can you ", "could you ", "ok "]);
    let suffix = pick(rng, &["", "", "", "", "", "", "", " please", " now"]);
    format!("{prefix}{core}{suffix}")
}

/// Chance of a filler before each word and at the end. A per-word rate keeps
/// the filler share of every response's tokens roughly equal.
const FILLER_RATE: f64 = 0.4;

fn with_fillers(rng: &mut ChaCha8Rng, text: String) -> String {
    let mut out: Vec<&str> = Vec::new();
    for word in text.split(' ') {
        if rng.gen_bool(FILLER_RATE) {
            out.push(pick(rng, &FILLERS));
        }
        out.push(word);
    }
    if rng.gen_bool(FILLER_RATE) {
        out.push(pick(rng, &FILLERS));
    }
    out.join(" ")
}

fn move_pair(rng: &mut ChaCha8Rng) -> TrainingPair {
    let forward = rng.gen_bool(0.6);
    let feet = rng.gen_range(*MOVE_FEET.start()..=*MOVE_FEET.end());
    let verb = pick(rng, &["move", "go", "drive"]);
    let dir = if forward {
        pick(rng, &["forward", "ahead", "forwards"])
    } else {
        pick(rng, &["backward", "back", "backwards"])
    };
    let n = number(rng, feet);
    let unit = if feet == 1 { pick(rng, &["foot", "feet", "ft"]) } else { pick(rng, &["feet", "ft", "feet"]) };
    let core = match rng.gen_range(0..6) {
        // A bare distance means forward.
        5 if forward => format!("{verb} {n} {unit}"),
        0 | 5 => format!("{verb} {dir} {n} {unit}"),
        1 => format!("{verb} {n} {unit} {dir}"),
        2 => format!("{verb} {dir} about {n} {unit}"),
        3 => format!("{dir} {n} {unit}"),
        _ => format!("{verb} {dir} for {n} {unit}"),
    };
    let instruction = canonical_text(if forward { Verb::MoveForward } else { Verb::MoveBackward }, Some(feet));
    actionable(rng, core, &instruction)
}

fn turn_pair(rng: &mut ChaCha8Rng) -> TrainingPair {
    let left = rng.gen_bool(0.5);
    let dir = if left { "left" } else { "right" };
    let degrees = *TURN_DEGREES.choose(rng).expect("angles");
    let verb = pick(rng, &["turn", "rotate", "spin"]);
    let n = number(rng, degrees);
    let core = match rng.gen_range(0..6) {
        0 => format!("{verb} {dir} {n} degrees"),
        1 => format!("{verb} {n} degrees to the {dir}"),
        2 => format!("{verb} to the {dir} {n} degrees"),
        3 => format!("{verb} {dir} {n}"),
        4 => format!("make a {dir} {n}"),
        _ => format!("{verb} {n} degrees {dir}"),
    };
    let instruction = canonical_text(if left { Verb::TurnLeft } else { Verb::TurnRight }, Some(degrees));
    actionable(rng, core, &instruction)
}

fn special_turn_pair(rng: &mut ChaCha8Rng) -> TrainingPair {
    let (core, degrees) = if rng.gen_bool(0.5) {
        (pick(rng, &["turn around", "turn all the way around", "face the other way", "spin around", "about face"]), 180)
    } else {
        (pick(rng, &["do a full circle", "spin in a full circle", "turn all the way around twice", "do a full rotation"]), 360)
    };
    actionable(rng, core.to_string(), &canonical_text(Verb::TurnLeft, Some(degrees)))
}

fn photo_pair(rng: &mut ChaCha8Rng) -> TrainingPair {
    let core = pick(
        rng,
        &[
            "take a picture", "take a photo", "what do you see", "send me a picture", "snap a photo",
            "show me what you see", "take a pic", "what is in front of you", "send a photo", "picture please",
            "what can you see", "get me an image", "take a snapshot", "show me a picture", "what do you see now",
            "tell me what you see", "do you see anything", "what do you see there",
        ],
    );
    actionable(rng, core.to_string(), &canonical_text(Verb::TakeImage, None))
}

fn sweep_pair(rng: &mut ChaCha8Rng) -> TrainingPair {
    let total = *[180u32, 360].choose(rng).expect("totals");
    let step = 45;
    let explicit = rng.gen_bool(0.6);
    let left = !explicit || rng.gen_bool(0.5);
    let dir = if left { "left" } else { "right" };
    let (t, s) = (number(rng, total), number(rng, step));
    let core = match (explicit, rng.gen_range(0..3)) {
        (true, 0) => format!("turn {dir} {t} degrees and take a picture every {s}"),
        (true, 1) => format!("rotate {dir} {t} degrees taking a photo every {s} degrees"),
        (true, _) => format!("spin {dir} {t} and snap a picture every {s} degrees"),
        (false, 0) => format!("turn {t} degrees and take a picture every {s}"),
        (false, 1) => format!("rotate {t} and take a photo every {s} degrees"),
        (false, _) => format!("spin {t} degrees taking pictures every {s}"),
    };
    actionable(rng, core, &sweep_text(left, total, step))
}

fn landmark_pair(rng: &mut ChaCha8Rng) -> TrainingPair {
    let landmark = pick(rng, &LANDMARKS);
    let verb = pick(rng, &["go to", "drive to", "head over to", "move to", "navigate to", "go over to"]);
    actionable(rng, format!("{verb} the {landmark}"), &format!("Go to the {landmark}"))
}

fn actionable(rng: &mut ChaCha8Rng, core: String, instruction: &str) -> TrainingPair {
    let polite = politeness(rng, core);
    let utterance = with_fillers(rng, polite);
    TrainingPair::actionable(&utterance, feedback_for(instruction), instruction)
}

fn reply(rng: &mut ChaCha8Rng, core: &str, response: &str, label: Label) -> TrainingPair {
    let polite = politeness(rng, core.to_string());
    let utterance = with_fillers(rng, polite);
    TrainingPair::reply(&utterance, response, label)
}

fn clarify_pair(rng: &mut ChaCha8Rng) -> TrainingPair {
    match rng.gen_range(0..5) {
        0 => {
            let core = pick(rng, &["move forward", "go forward", "drive ahead", "go straight", "keep going", "move ahead", "head forward"]);
            reply(rng, core, ASK_DISTANCE_FORWARD, Label::Clarify)
        }
        1 => {
            let core = pick(rng, &["back up", "move back", "go backward", "reverse", "drive backwards", "move backward"]);
            reply(rng, core, ASK_DISTANCE_BACKWARD, Label::Clarify)
        }
        2 => {
            let core = pick(rng, &["turn left", "go left", "rotate left", "take a left", "hang a left", "spin left"]);
            reply(rng, core, ASK_ANGLE_LEFT, Label::Clarify)
        }
        3 => {
            let core = pick(rng, &["turn right", "go right", "rotate right", "take a right", "hang a right", "spin right"]);
            reply(rng, core, ASK_ANGLE_RIGHT, Label::Clarify)
        }
        _ => {
            let core = pick(rng, &["turn", "rotate", "spin", "turn a bit", "change direction"]);
            reply(rng, core, ASK_TURN, Label::Clarify)
        }
    }
}

fn info_pair(rng: &mut ChaCha8Rng) -> TrainingPair {
    let (response, phrasings) = INFO.choose(rng).expect("info intents");
    let core = pick(rng, phrasings);
    reply(rng, core, response, Label::Info)
}

fn nonsense(rng: &mut ChaCha8Rng) -> String {
    const SYLLABLES: [&str; 16] =
        ["bla", "zor", "quin", "tef", "mup", "ga", "lix", "dro", "vem", "pok", "sna", "ruf", "ki", "yob", "wex", "jun"];
    let words = rng.gen_range(1..=3);
    (0..words)
        .map(|_| (0..rng.gen_range(2..=3)).map(|_| pick(rng, &SYLLABLES)).collect::<String>())
        .collect::<Vec<_>>()
        .join(" ")
}

fn reject_pair(rng: &mut ChaCha8Rng) -> TrainingPair {
    if rng.gen_bool(0.4) {
        let text = nonsense(rng);
        let utterance = with_fillers(rng, text);
        TrainingPair::reply(&utterance, NEGATIVE_FEEDBACK, Label::Reject)
    } else {
        let core = pick(rng, REJECT);
        reply(rng, core, NEGATIVE_FEEDBACK, Label::Reject)
    }
}

fn actionable_pair(rng: &mut ChaCha8Rng) -> TrainingPair {
    match rng.gen_range(0..100) {
        0..=38 => move_pair(rng),
        39..=66 => turn_pair(rng),
        67..=71 => special_turn_pair(rng),
        72..=88 => photo_pair(rng),
        89..=93 => sweep_pair(rng),
        _ => landmark_pair(rng),
    }
}

/// Generates `size` distinct pairs, deterministic per `seed`. Labels follow a
/// fixed 6:2:1:1 actionable:clarify:info:reject schedule so that every label
/// appears once `size >= 10`.
pub fn gen_corpus(seed: u64, size: usize) -> Result<Corpus, NluError> {
    if size < MIN_CORPUS_SIZE {
        return Err(NluError::InvalidCorpus(format!("size must be at least {MIN_CORPUS_SIZE}, got {size}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut pairs = Vec::with_capacity(size);
    for i in 0..size {
        let make: fn(&mut ChaCha8Rng) -> TrainingPair = match i % 10 {
            0..=5 => actionable_pair,
            6 | 7 => clarify_pair,
            8 => info_pair,
            _ => reject_pair,
        };
        let mut attempts = 0;
        let pair = loop {
            let pair = make(&mut rng);
            let key = (pair.utterance.clone(), pair.rn_instruction.clone());
            // Nonsense rejects never run out, so fall back to them if a small
            // template family is exhausted.
            attempts += 1;
            if seen.insert(key) {
                break pair;
            }
            if attempts > 200 {
                let pair = reject_pair(&mut rng);
                if seen.insert((pair.utterance.clone(), pair.rn_instruction.clone())) {
                    break pair;
                }
            }
        };
        pairs.push(pair);
    }
    Corpus::new(pairs, seed)
}
