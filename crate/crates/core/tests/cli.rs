use std::process::Command;

use scoutbot::harness::gen_corpus;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scoutbot"))
}

#[test]
fn help_lists_every_subcommand() {
    let out = bin().arg("--help").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for sub in ["broker", "bridge", "dm", "rn", "sim", "gateway", "gen-corpus", "train", "eval", "run-scenario"] {
        assert!(text.lines().any(|l| l.trim_start().starts_with(sub)), "missing {sub}");
    }
    let out = bin().args(["bridge", "--help"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for flag in ["--config", "--dialogue", "--robot", "--mark"] {
        assert!(text.contains(flag), "bridge lacks {flag}");
    }
}

#[test]
fn seed_env_overrides_corpus_seed() {
    let out = bin().args(["gen-corpus", "--size", "20"]).env("SCOUT_SEED", "9").output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), gen_corpus(9, 20).unwrap().to_jsonl());
}

#[test]
fn train_then_run_with_saved_model() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    let model = dir.path().join("model.txt");
    let config = dir.path().join("pipeline.toml");
    let log = dir.path().join("run.json");
    assert!(bin().args(["gen-corpus", "--size", "300", "--out"]).arg(&corpus).status().unwrap().success());
    assert!(bin().args(["train", "--corpus"]).arg(&corpus).arg("--out").arg(&model).status().unwrap().success());
    std::fs::write(&config, format!("model = {:?}\n", model.to_str().unwrap())).unwrap();

    let out = bin().args(["run-scenario", "landmark", "--config"]).arg(&config).arg("--log").arg(&log).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("unsupported instruction"));
    let run = scoutbot::harness::RunLog::from_json(&std::fs::read_to_string(&log).unwrap()).unwrap();
    assert_eq!(run.scenario.name, "landmark");
}

#[test]
fn failed_expectation_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("bad.scenario");
    std::fs::write(&sc, "world open\nsay 0 hello there\nexpect image\n").unwrap();
    let out = bin().arg("run-scenario").arg(&sc).arg("--offline").output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().contains("unmet expectation: image"));
}
