//! 2D simulated environment: differential-drive kinematics, axis-aligned
//! obstacles, ray-cast LIDAR, occupancy mapping and frontal photos.

mod grid;
mod kinematics;
mod lidar;
mod node;
mod photo;
mod sim;
mod world;

pub use grid::{update_map, Cell, CellDelta, OccupancyGrid, DEFAULT_RESOLUTION};
pub use kinematics::{angle_diff, arc_pose, normalize_angle, step, Pose, StepOutcome, STANDOFF};
pub use lidar::{cast_ray, lidar_scan, LidarConfig, LidarScan, RayHit};
pub use node::{run_sim_node, MAX_CELLS_PER_MESSAGE, CaptureRequest, DriveRequest, PhotoMessage, SimNode, SimOutcome, SimResult};
pub use photo::{render_photo, Photo, PHOTO_FOV, PHOTO_MAX_DEPTH};
pub use sim::{DriveOutcome, MapUpdate, SimConfig, SimWorld, DEFAULT_TICK};
pub use world::{Obstacle, Rect, World, BOUNDARY_LABEL, DEFAULT_FOOTPRINT};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("world: {0}")]
    World(String),
    #[error("simulator unavailable: {0}")]
    Unavailable(String),
}
