//! Running scenarios: in process, or across two brokers with every
//! component as a bus node.

use std::net::SocketAddr;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use tracing::debug;

use super::{HarnessError, PipelineConfig, RunLog, Scenario};
use crate::bridge::{run_bridge, BridgeHandle, ConnectPolicy};
use crate::dialogue::{run_dm_node, DialogueEvent, DmNodeConfig, DmSession, DmState};
use crate::harness::gateway::{serve_gateway, GatewayHandle};
use crate::messaging::{topics, BrokerConfig, BrokerHandle, BusClient, NodeHandle};
use crate::navigator::{execute, run_rn_node, RnNodeConfig};
use crate::nlu::RelevanceModel;
use crate::simworld::{run_sim_node, SimNode, SimWorld, World};

fn loopback() -> SocketAddr {
    SocketAddr::from(([127, 0, 0, 1], 0))
}

/// A configuration with its trained model, ready to run scenarios.
pub struct Runner {
    config: PipelineConfig,
    model: RelevanceModel,
}

impl Runner {
    /// Builds the model the configuration describes.
    pub fn new(config: PipelineConfig) -> Result<Self, HarnessError> {
        let model = config.model()?;
        Ok(Self { config, model })
    }

    pub fn with_model(config: PipelineConfig, model: RelevanceModel) -> Self {
        Self { config, model }
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn model(&self) -> &RelevanceModel {
        &self.model
    }

    /// The configuration as it applies to `scenario`, and its world.
    pub fn effective(&self, scenario: &Scenario) -> Result<(PipelineConfig, World), HarnessError> {
        let mut config = self.config.clone();
        if let Some(w) = &scenario.world {
            config.world = w.clone();
        }
        let world = World::resolve(&config.world)?;
        Ok((config, world))
    }

    /// Runs `scenario` in process: dialogue manager, navigator and simulator
    /// called directly, in the order the bus would deliver.
    pub fn run_offline(&self, scenario: &Scenario) -> Result<RunLog, HarnessError> {
        let (config, world) = self.effective(scenario)?;
        let mut sim = SimWorld::new(world, config.sim.clone());
        let mut session = DmSession::new(self.model.clone());
        let mut events = Vec::new();
        for say in &scenario.says {
            let t = session.clock() + say.delay;
            let mut pending: Vec<DialogueEvent> = session.commander(&say.text, Some(t));
            while !pending.is_empty() {
                let dispatched: Vec<String> = pending.iter().filter_map(|e| e.instruction().map(str::to_string)).collect();
                events.append(&mut pending);
                for instruction in dispatched {
                    let mut reports = Vec::new();
                    if let Err(e) = execute(&instruction, &config.motion, &mut sim, &mut |r| reports.push(r)) {
                        debug!(%instruction, "execution failed: {e}");
                    }
                    for report in &reports {
                        pending.extend(session.status(report));
                    }
                }
            }
        }
        Ok(RunLog { seed: config.seed, final_pose: sim.pose(), config, scenario: scenario.clone(), events })
    }

    /// Runs `scenario` across the full bus pipeline.
    pub async fn run_bus(&self, scenario: &Scenario) -> Result<RunLog, HarnessError> {
        self.run_bus_with_gateway(scenario, None).await
    }

    /// Like [`Runner::run_bus`], also serving the UI gateway at `gateway`.
    pub async fn run_bus_with_gateway(&self, scenario: &Scenario, gateway: Option<SocketAddr>) -> Result<RunLog, HarnessError> {
        let (config, world) = self.effective(scenario)?;
        let pipeline = Pipeline::launch(&config, world, self.model.clone(), gateway).await?;
        let result = drive_scenario(&pipeline, &config, scenario).await;
        let final_pose = pipeline.sim().lock().expect("sim lock").pose();
        pipeline.stop().await;
        let events = result?;
        Ok(RunLog { seed: config.seed, final_pose, config, scenario: scenario.clone(), events })
    }
}

/// Reruns a log's scenario under its recorded configuration.
pub fn replay(log: &RunLog) -> Result<RunLog, HarnessError> {
    Runner::new(log.config.clone())?.run_offline(&log.scenario)
}

async fn drive_scenario(pipeline: &Pipeline, config: &PipelineConfig, scenario: &Scenario) -> Result<Vec<DialogueEvent>, HarnessError> {
    let (client, mut inbox) = BusClient::connect(pipeline.dialogue_addr(), "scenario").await?;
    client.subscribe(topics::DM_EVENTS).await?;
    client.subscribe(topics::DM_STATE).await?;
    let step_timeout = Duration::from_secs_f64(config.step_timeout.max(0.0));

    let mut events = Vec::new();
    let mut clock = 0.0;
    for (k, say) in scenario.says.iter().enumerate() {
        if say.delay > 0.0 && config.think_time_scale > 0.0 {
            tokio::time::sleep(Duration::from_secs_f64(say.delay * config.think_time_scale)).await;
        }
        let payload = serde_json::json!({ "text": say.text, "t": clock + say.delay }).to_string();
        client.publish(topics::COMMANDER_IN, &payload, None).await?;

        let deadline = tokio::time::Instant::now() + step_timeout;
        loop {
            let env = tokio::time::timeout_at(deadline, inbox.recv())
                .await
                .map_err(|_| HarnessError::Timeout(format!("pipeline did not settle after {:?}", say.text)))?
                .ok_or_else(|| HarnessError::Timeout("dialogue bus closed".into()))?;
            match env.topic.as_str() {
                topics::DM_EVENTS => events.push(
                    serde_json::from_str::<DialogueEvent>(&env.payload).map_err(|e| HarnessError::Format(e.to_string()))?,
                ),
                topics::DM_STATE => {
                    let state: DmState = serde_json::from_str(&env.payload).map_err(|e| HarnessError::Format(e.to_string()))?;
                    clock = state.clock;
                    if state.idle && state.commander_inputs > k as u64 {
                        break;
                    }
                }
                _ => {}
            }
        }
    }
    Ok(events)
}

/// Both brokers, the bridge, and the simulator, navigator and dialogue
/// manager nodes, all on loopback with ephemeral ports.
pub struct Pipeline {
    dialogue: BrokerHandle,
    robot: BrokerHandle,
    bridge: BridgeHandle,
    sim: SimNode,
    rn: NodeHandle,
    dm: NodeHandle,
    gateway: Option<GatewayHandle>,
}

impl Pipeline {
    /// Starts every component. With `gateway`, also serves the UI gateway there.
    pub async fn launch(
        config: &PipelineConfig,
        world: World,
        model: RelevanceModel,
        gateway: Option<SocketAddr>,
    ) -> Result<Self, HarnessError> {
        let dialogue = BrokerHandle::start(loopback(), BrokerConfig::default()).await?;
        let robot = BrokerHandle::start(loopback(), BrokerConfig::default()).await?;
        let bridge =
            run_bridge(config.bridge_config()?, dialogue.local_addr(), robot.local_addr(), ConnectPolicy::default()).await?;
        let sim = run_sim_node(SimWorld::new(world, config.sim.clone()), robot.local_addr()).await?;
        let rn_config = RnNodeConfig { profile: config.motion, ..RnNodeConfig::default() };
        let rn = run_rn_node(robot.local_addr(), rn_config).await?;
        let dm = run_dm_node(model, dialogue.local_addr(), DmNodeConfig::default()).await?;
        let gateway = match gateway {
            Some(bind) => Some(serve_gateway(bind, dialogue.local_addr(), robot.local_addr()).await?),
            None => None,
        };
        Ok(Self { dialogue, robot, bridge, sim, rn, dm, gateway })
    }

    pub fn dialogue_addr(&self) -> SocketAddr {
        self.dialogue.local_addr()
    }

    pub fn robot_addr(&self) -> SocketAddr {
        self.robot.local_addr()
    }

    pub fn gateway_addr(&self) -> Option<SocketAddr> {
        self.gateway.as_ref().map(GatewayHandle::local_addr)
    }

    pub fn sim(&self) -> Arc<Mutex<SimWorld>> {
        self.sim.sim.clone()
    }

    /// Stops components in reverse start order.
    pub async fn stop(self) {
        if let Some(g) = self.gateway {
            g.stop().await;
        }
        self.dm.stop().await;
        self.rn.stop().await;
        self.sim.handle.stop().await;
        self.bridge.stop().await;
        self.robot.stop().await;
        self.dialogue.stop().await;
    }
}
