//! Generates a seeded corpus, trains a model on all of it, saves and
//! reloads the model text and classifies a few utterances.

use scoutbot::harness::{gen_corpus, seed_from_env, train_model, DEFAULT_SEED};
use scoutbot::nlu::{RelevanceModel, DEFAULT_LAMBDA};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = gen_corpus(seed_from_env(DEFAULT_SEED), 400)?;
    for pair in corpus.pairs().iter().take(5) {
        println!("{pair:?}");
    }
    let model = train_model(&corpus, DEFAULT_LAMBDA)?;
    println!("{} classes, threshold {:?}", model.classes().len(), model.threshold());

    let path = std::env::temp_dir().join("scoutbot-example-model.txt");
    std::fs::write(&path, model.to_text())?;
    let reloaded = RelevanceModel::from_text(&std::fs::read_to_string(&path)?)?;
    assert_eq!(reloaded, model);

    for q in ["uh move forward 5 feet", "turn left", "what is that", "fly to the moon"] {
        let c = reloaded.classify(q, 3);
        let top: Vec<String> = c.hits.iter().map(|h| format!("{} ({:.3})", reloaded.classes()[h.class].id, h.score)).collect();
        println!("{q:?}: {top:?} -> {}", reloaded.decide(q));
    }
    Ok(())
}
