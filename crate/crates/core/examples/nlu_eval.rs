use scoutbot::harness::{gen_corpus, train_and_evaluate, DEFAULT_CORPUS_SIZE};
use scoutbot::nlu::DEFAULT_LAMBDA;

fn main() {
    let seed = std::env::var("SCOUT_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(1);
    let corpus = gen_corpus(seed, DEFAULT_CORPUS_SIZE).expect("corpus");
    let (model, report) = train_and_evaluate(&corpus, DEFAULT_LAMBDA).expect("train");
    println!("{report:#?}");
    for q in ["Move forward", "move forward 3 feet", "Uh move um 10 feet", "zzz qqq", "turn right 45 degrees", "what do you see", "Go to the orange cone"] {
        println!("{q:?} -> {:?}", model.hybrid_output(q));
    }
}
