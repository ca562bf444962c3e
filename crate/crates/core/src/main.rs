use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tracing_subscriber::EnvFilter;

use scoutbot::bridge::{load_rules, run_bridge, ConnectPolicy};
use scoutbot::dialogue::{run_dm_node, DmNodeConfig};
use scoutbot::harness::{
    gen_corpus, seed_from_env, serve_gateway, train_and_evaluate, train_model, PipelineConfig, Runner, Scenario,
    DEFAULT_CORPUS_SIZE, DEFAULT_SEED,
};
use scoutbot::messaging::{BrokerConfig, BrokerHandle, DEFAULT_MAX_PAYLOAD};
use scoutbot::navigator::{run_rn_node, RnNodeConfig};
use scoutbot::nlu::{Corpus, DEFAULT_LAMBDA};
use scoutbot::simworld::{run_sim_node, SimWorld, World};

type Error = Box<dyn std::error::Error>;

#[derive(Parser)]
#[command(name = "scoutbot", version, about = "ScoutBot dialogue pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a message broker.
    Broker {
        #[arg(long, default_value = "127.0.0.1:7400")]
        bind: SocketAddr,
        #[arg(long, default_value_t = DEFAULT_MAX_PAYLOAD)]
        max_payload: usize,
    },
    /// Bridge the dialogue and robot buses.
    Bridge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        dialogue: SocketAddr,
        #[arg(long)]
        robot: SocketAddr,
        /// Overrides the config's mark line.
        #[arg(long)]
        mark: Option<String>,
    },
    /// Run the dialogue manager on the dialogue bus.
    Dm {
        #[arg(long)]
        dialogue: SocketAddr,
        /// Pipeline config (TOML); its model settings are used.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the robot navigator on the robot bus.
    Rn {
        #[arg(long)]
        robot: SocketAddr,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the simulator on the robot bus.
    Sim {
        #[arg(long)]
        robot: SocketAddr,
        /// Bundled world name or world file; defaults to the config's.
        #[arg(long)]
        world: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Serve the Commander display WebSocket.
    Gateway {
        #[arg(long, default_value = "127.0.0.1:7480")]
        bind: SocketAddr,
        #[arg(long)]
        dialogue: SocketAddr,
        #[arg(long)]
        robot: SocketAddr,
    },
    /// Write a synthetic training corpus as JSON lines.
    GenCorpus {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CORPUS_SIZE)]
        size: usize,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a model on every pair of a corpus.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LAMBDA)]
        lambda: f64,
    },
    /// Train on the seeded 80% split and report held-out metrics.
    Eval {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LAMBDA)]
        lambda: f64,
        /// Split seed.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Run a scenario end to end; exits nonzero if an expectation fails.
    RunScenario {
        /// Bundled scenario name or scenario file.
        scenario: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Where to write the run log (JSON).
        #[arg(long)]
        log: Option<PathBuf>,
        /// Run in process instead of over the buses.
        #[arg(long)]
        offline: bool,
        /// Also serve the UI gateway here during the run.
        #[arg(long)]
        gateway: Option<SocketAddr>,
    },
}

fn load_config(path: Option<&PathBuf>) -> Result<PipelineConfig, Error> {
    let config = match path {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    Ok(config.with_env())
}

async fn until_interrupted() {
    let _ = tokio::signal::ctrl_c().await;
}

async fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Broker { bind, max_payload } => {
            let broker = BrokerHandle::start(bind, BrokerConfig { max_payload }).await?;
            eprintln!("broker listening on {}", broker.local_addr());
            until_interrupted().await;
            broker.stop().await;
        }
        Command::Bridge { config, dialogue, robot, mark } => {
            let mut rules = load_rules(&std::fs::read_to_string(&config)?)?;
            if let Some(mark) = mark {
                rules = rules.with_mark(mark)?;
            }
            let bridge = run_bridge(rules, dialogue, robot, ConnectPolicy::default()).await?;
            until_interrupted().await;
            bridge.stop().await;
        }
        Command::Dm { dialogue, config } => {
            let model = load_config(config.as_ref())?.model()?;
            let node = run_dm_node(model, dialogue, DmNodeConfig::default()).await?;
            until_interrupted().await;
            node.stop().await;
        }
        Command::Rn { robot, config } => {
            let config = load_config(config.as_ref())?;
            let node = run_rn_node(robot, RnNodeConfig { profile: config.motion, ..RnNodeConfig::default() }).await?;
            until_interrupted().await;
            node.stop().await;
        }
        Command::Sim { robot, world, config } => {
            let config = load_config(config.as_ref())?;
            let world = World::resolve(world.as_deref().unwrap_or(&config.world))?;
            let node = run_sim_node(SimWorld::new(world, config.sim), robot).await?;
            until_interrupted().await;
            node.handle.stop().await;
        }
        Command::Gateway { bind, dialogue, robot } => {
            let gateway = serve_gateway(bind, dialogue, robot).await?;
            eprintln!("gateway listening on ws://{}", gateway.local_addr());
            until_interrupted().await;
            gateway.stop().await;
        }
        Command::GenCorpus { seed, size, out } => {
            let text = gen_corpus(seed_from_env(seed), size)?.to_jsonl();
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
        }
        Command::Train { corpus, out, lambda } => {
            let corpus = Corpus::from_jsonl(&std::fs::read_to_string(corpus)?, seed_from_env(DEFAULT_SEED))?;
            let model = train_model(&corpus, lambda)?;
            std::fs::write(&out, model.to_text())?;
            eprintln!("{} classes, threshold {:?}", model.classes().len(), model.threshold());
        }
        Command::Eval { corpus, lambda, seed } => {
            let corpus = Corpus::from_jsonl(&std::fs::read_to_string(corpus)?, seed_from_env(seed))?;
            let (_, report) = train_and_evaluate(&corpus, lambda)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::RunScenario { scenario, config, log, offline, gateway } => {
            let scenario = Scenario::resolve(&scenario)?;
            let runner = Runner::new(load_config(config.as_ref())?)?;
            let run = if offline {
                runner.run_offline(&scenario)?
            } else {
                runner.run_bus_with_gateway(&scenario, gateway).await?
            };
            print!("{}", run.to_text());
            if let Some(path) = log {
                std::fs::write(path, run.to_json())?;
            }
            let failures = run.failures();
            for f in &failures {
                eprintln!("unmet expectation: {f}");
            }
            if !failures.is_empty() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("warn")))
        .with_writer(std::io::stderr)
        .init();
    match run(Cli::parse().command).await {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
