//! Scans the apartment from a few headings and prints the occupancy map.

use scoutbot::navigator::{parse_instruction, to_twist, MotionProfile};
use scoutbot::simworld::{lidar_scan, Cell, SimConfig, SimWorld, World};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "apartment".into());
    let world = World::resolve(&name)?;
    let config = SimConfig::default();
    let scan = lidar_scan(&world, world.start, &config.lidar);
    let nearest = scan.ranges.iter().cloned().fold(f64::INFINITY, f64::min);
    println!("{} beams, nearest return {nearest:.3} m", scan.ranges.len());

    let mut sim = SimWorld::new(world, config);
    sim.scan();
    let turn = to_twist(&parse_instruction("Turn left 90 degrees")?, &MotionProfile::default())?;
    for _ in 0..4 {
        sim.drive(&turn, |u| println!("map update: {} cells at t {:.2}", u.cells.len(), u.sim_time));
    }
    let grid = sim.grid();
    println!("{}", grid.render());
    println!("occupied {} free {} unknown {}", grid.count(Cell::Occupied), grid.count(Cell::Free), grid.count(Cell::Unknown));
    Ok(())
}
