//! Converts instructions to timed twists and drives the simulated robot,
//! checking the closed-form pose against fine Euler integration.

use scoutbot::navigator::{parse_instruction, to_twist, MotionProfile};
use scoutbot::simworld::{arc_pose, Pose, SimConfig, SimWorld, World};

fn euler(mut p: Pose, v: f64, w: f64, dt: f64, steps: usize) -> Pose {
    let h = dt / steps as f64;
    for _ in 0..steps {
        p = Pose::new(p.x + v * p.theta.cos() * h, p.y + v * p.theta.sin() * h, p.theta + w * h);
    }
    p
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let start = Pose::new(0.0, 0.0, 0.3);
    let exact = arc_pose(start, 0.5, 0.4, 2.0);
    let approx = euler(start, 0.5, 0.4, 2.0, 1_000_000);
    println!("arc {exact:?}\neuler {approx:?}");

    let profile = MotionProfile::default();
    let mut sim = SimWorld::new(World::bundled("apartment")?, SimConfig::default());
    println!("start {:?}", sim.pose());
    for text in ["Move forward 3 feet", "Turn left 90 degrees", "Move forward 10 feet"] {
        let twist = to_twist(&parse_instruction(text)?, &profile)?;
        let out = sim.drive(&twist, |_| {});
        println!("{text}: {twist:?} -> pose {:?} blocked {} t {:.2}", out.pose, out.blocked, out.sim_time);
    }
    Ok(())
}
