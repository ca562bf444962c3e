//! Launches the full pipeline with the WebSocket gateway, connects as a
//! display client, sends one command and prints records up to the photo.

use std::net::SocketAddr;
use std::time::Duration;

use futures::{SinkExt, StreamExt};
use tokio_tungstenite::tungstenite::Message;

use scoutbot::harness::{GatewayRecord, Pipeline, PipelineConfig, RecordType};
use scoutbot::simworld::World;

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = PipelineConfig::default().with_env();
    let model = config.model()?;
    let bind = SocketAddr::from(([127, 0, 0, 1], 0));
    let pipeline = Pipeline::launch(&config, World::resolve(&config.world)?, model, Some(bind)).await?;
    let url = format!("ws://{}", pipeline.gateway_addr().ok_or("no gateway")?);
    println!("connecting to {url}");
    let (mut ws, _) = tokio_tungstenite::connect_async(url).await?;

    ws.send(Message::Text(r#"{"type":"snapshot"}"#.into())).await?;
    ws.send(Message::Text(r#"{"type":"command","text":"take a picture"}"#.into())).await?;
    while let Ok(Some(msg)) = tokio::time::timeout(Duration::from_secs(10), ws.next()).await {
        let Message::Text(text) = msg? else { continue };
        let record: GatewayRecord = serde_json::from_str(&text)?;
        match record.kind {
            RecordType::Map => println!("#{} map ({} bytes)", record.seq, text.len()),
            RecordType::Photo => {
                println!("#{} photo {}", record.seq, record.body["reference"]);
                break;
            }
            _ => println!("#{} {:?} {}", record.seq, record.kind, record.body),
        }
    }
    pipeline.stop().await;
    Ok(())
}
