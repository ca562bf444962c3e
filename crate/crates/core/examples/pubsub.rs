//! One broker, one publisher, one wildcard subscriber.

use std::time::Duration;

use scoutbot::messaging::{BrokerConfig, BrokerHandle, BusClient};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let broker = BrokerHandle::start("127.0.0.1:0".parse()?, BrokerConfig::default()).await?;
    println!("broker on {}", broker.local_addr());

    let (sub, mut inbox) = BusClient::connect(broker.local_addr(), "listener").await?;
    sub.subscribe("rn.*").await?;
    let (publisher, _) = BusClient::connect(broker.local_addr(), "talker").await?;
    for text in ["Move forward 3 feet", "Turn right 45 degrees"] {
        let seq = publisher.publish("rn.instruction", text, None).await?;
        println!("published #{seq}: {text}");
    }
    publisher.publish("dm.events", "not for the listener", None).await?;

    while let Some(env) = inbox.recv_timeout(Duration::from_millis(200)).await {
        println!("{} from {:?} seq {}: {}", env.topic, env.origin, env.seq, env.payload);
    }
    broker.stop().await;
    Ok(())
}
