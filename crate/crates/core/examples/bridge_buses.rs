//! Bridges two buses with the bundled rules and shows the loop guard:
//! a rule pointing back at the source bus never echoes a marked copy.

use std::time::Duration;

use scoutbot::bridge::{load_rules, run_bridge, BridgeConfig, ConnectPolicy};
use scoutbot::messaging::{BrokerConfig, BrokerHandle, BusClient};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let any = "127.0.0.1:0".parse()?;
    let dialogue = BrokerHandle::start(any, BrokerConfig::default()).await?;
    let robot = BrokerHandle::start(any, BrokerConfig::default()).await?;

    let rules = BridgeConfig::pipeline_default();
    println!("{rules:#?}");
    let bridge = run_bridge(rules, dialogue.local_addr(), robot.local_addr(), ConnectPolicy::default()).await?;

    let (rn, mut rn_inbox) = BusClient::connect(robot.local_addr(), "rn").await?;
    rn.subscribe("rn.instruction").await?;
    let (dm, _) = BusClient::connect(dialogue.local_addr(), "dm").await?;
    dm.publish("dm.rn.instruction", "Turn left 90 degrees", None).await?;
    let env = rn_inbox.recv_timeout(Duration::from_secs(2)).await.ok_or("nothing bridged")?;
    println!("robot bus got {} {:?} mark {:?}", env.topic, env.payload, env.bridge_mark);
    bridge.stop().await;

    // Mirrored rules: each message crosses once and stops.
    let mirrored = load_rules("rule dialogue echo.t -> robot echo.t identity\nrule robot echo.t -> dialogue echo.t identity")?;
    let bridge = run_bridge(mirrored, dialogue.local_addr(), robot.local_addr(), ConnectPolicy::default()).await?;
    let (watch, mut inbox) = BusClient::connect(robot.local_addr(), "watch").await?;
    watch.subscribe("echo.t").await?;
    for i in 0..5 {
        dm.publish("echo.t", &format!("ping {i}"), None).await?;
    }
    let mut copies = 0;
    while inbox.recv_timeout(Duration::from_millis(300)).await.is_some() {
        copies += 1;
    }
    println!(
        "mirrored rules: {copies} copies on robot bus, translated {}, loops dropped {}",
        bridge.stats().translated(),
        bridge.stats().looped()
    );
    bridge.stop().await;
    Ok(())
}
