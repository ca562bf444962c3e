//! Drives the dialogue manager by hand, playing the robot's part, and
//! prints every event it produces.

use scoutbot::dialogue::{DialogueEvent, DmSession, RnStatus};
use scoutbot::harness::PipelineConfig;
use scoutbot::navigator::StatusReport;

fn show(events: &[DialogueEvent]) {
    for e in events {
        println!("{e:?}");
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = PipelineConfig::default().with_env().model()?;
    let mut dm = DmSession::new(model);

    show(&dm.commander("Move forward", Some(0.0)));
    let events = dm.commander("3 feet", Some(2.0));
    show(&events);

    // Acknowledge the dispatched instruction as the navigator would.
    if let Some(instruction) = events.iter().find_map(DialogueEvent::instruction).map(str::to_string) {
        for (status, t) in [(RnStatus::Started, 2.0), (RnStatus::Done, 3.9)] {
            let mut report = StatusReport::new(status, &instruction);
            report.sim_time = Some(t);
            show(&dm.status(&report));
        }
    }
    show(&dm.commander("Go to the orange cone", Some(5.0)));
    println!("{:?}", dm.state());
    Ok(())
}
