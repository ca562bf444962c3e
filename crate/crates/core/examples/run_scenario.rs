//! Runs a bundled scenario in process and over the buses, prints the
//! event log and checks the two runs agree.
//!
//!     cargo run --example run_scenario -- figure2

use scoutbot::harness::{PipelineConfig, Runner, Scenario};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "figure2".into());
    let scenario = Scenario::resolve(&name)?;
    let runner = Runner::new(PipelineConfig::default().with_env())?;

    let offline = runner.run_offline(&scenario)?;
    print!("{}", offline.to_text());
    println!("final pose: {:?}", offline.final_pose);

    let started = std::time::Instant::now();
    let bus = runner.run_bus(&scenario).await?;
    println!("bus run took {:.2?}; identical to in-process run: {}", started.elapsed(), bus == offline);

    if bus != offline {
        for (a, b) in offline.events.iter().zip(&bus.events) {
            if a != b {
                println!("first difference:\n  in process: {a:?}\n  bus:        {b:?}");
                break;
            }
        }
    }

    let failures = bus.failures();
    if failures.is_empty() {
        println!("all expectations met");
    } else {
        for f in &failures {
            println!("unmet: {f}");
        }
        std::process::exit(1);
    }
    Ok(())
}
