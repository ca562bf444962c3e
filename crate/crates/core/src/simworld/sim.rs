use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::navigator::TwistCommand;

use super::{lidar_scan, render_photo, step, update_map, CellDelta, LidarConfig, OccupancyGrid, Photo, Pose, World};

/// Fixed integration tick, seconds.
pub const DEFAULT_TICK: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub tick: f64,
    pub lidar: LidarConfig,
    pub resolution: f64,
    /// A scan is taken every this many ticks while driving, and at the end.
    pub scan_every: usize,
    pub photo_width: usize,
    /// Wall-clock pacing: 1.0 is real time, 0 runs as fast as possible.
    pub real_time_factor: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            tick: DEFAULT_TICK,
            lidar: LidarConfig::default(),
            resolution: super::DEFAULT_RESOLUTION,
            scan_every: 5,
            photo_width: 160,
            real_time_factor: 0.0,
        }
    }
}

/// Cells changed by one scan, with enough grid geometry to fold them
/// into an empty grid on the receiving side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapUpdate {
    pub pose: Pose,
    pub sim_time: f64,
    pub resolution: f64,
    pub origin_x: f64,
    pub origin_y: f64,
    pub width: usize,
    pub height: usize,
    pub cells: Vec<CellDelta>,
}

impl MapUpdate {
    /// Splits into updates of at most `max_cells` cells each, in order.
    /// An update with no cells stays whole.
    pub fn chunks(self, max_cells: usize) -> Vec<MapUpdate> {
        if self.cells.len() <= max_cells.max(1) {
            return vec![self];
        }
        self.cells
            .chunks(max_cells.max(1))
            .map(|cells| MapUpdate { cells: cells.to_vec(), ..self.clone() })
            .collect()
    }

    /// Folds this update into `grid`, starting a blank grid of the update's
    /// geometry if there is none or the geometry changed.
    pub fn fold_into(&self, grid: &mut Option<OccupancyGrid>) {
        let same = grid.as_ref().is_some_and(|g| {
            g.width == self.width
                && g.height == self.height
                && g.resolution == self.resolution
                && g.origin_x == self.origin_x
                && g.origin_y == self.origin_y
        });
        if !same {
            *grid = Some(OccupancyGrid::blank(self.origin_x, self.origin_y, self.width, self.height, self.resolution));
        }
        let g = grid.as_mut().expect("grid present");
        for delta in &self.cells {
            g.apply(delta);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveOutcome {
    pub pose: Pose,
    pub travelled: f64,
    pub elapsed: f64,
    pub blocked: bool,
    pub sim_time: f64,
}

/// The simulated robot in its world. Owned by a single simulation loop.
#[derive(Debug, Clone)]
pub struct SimWorld {
    world: World,
    config: SimConfig,
    pose: Pose,
    grid: OccupancyGrid,
    time: f64,
    photos: Vec<Photo>,
}

impl SimWorld {
    pub fn new(world: World, config: SimConfig) -> Self {
        let grid = OccupancyGrid::new(&world.bounds, config.resolution);
        Self { pose: world.start, world, config, grid, time: 0.0, photos: Vec::new() }
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn pose(&self) -> Pose {
        self.pose
    }

    pub fn grid(&self) -> &OccupancyGrid {
        &self.grid
    }

    /// Simulated seconds elapsed.
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn photos(&self) -> &[Photo] {
        &self.photos
    }

    pub fn photo(&self, reference: &str) -> Option<&Photo> {
        self.photos.iter().find(|p| p.reference == reference)
    }

    fn map_update(&self, cells: Vec<CellDelta>) -> MapUpdate {
        MapUpdate {
            pose: self.pose,
            sim_time: self.time,
            resolution: self.grid.resolution,
            origin_x: self.grid.origin_x,
            origin_y: self.grid.origin_y,
            width: self.grid.width,
            height: self.grid.height,
            cells,
        }
    }

    /// Scans from the current pose and folds the result into the map.
    pub fn scan(&mut self) -> MapUpdate {
        let scan = lidar_scan(&self.world, self.pose, &self.config.lidar);
        let cells = update_map(&mut self.grid, &scan);
        self.map_update(cells)
    }

    /// The whole known map as one update.
    pub fn snapshot(&self) -> MapUpdate {
        self.map_update(self.grid.snapshot())
    }

    /// Holds `twist` for its duration in fixed ticks. Stops early when blocked.
    pub fn drive(&mut self, twist: &TwistCommand, mut on_map: impl FnMut(MapUpdate)) -> DriveOutcome {
        let start_time = self.time;
        let mut travelled = 0.0;
        let mut blocked = false;
        let mut remaining = if twist.duration.is_finite() { twist.duration.max(0.0) } else { 0.0 };
        let mut ticks = 0usize;
        while remaining > 1e-12 {
            let dt = remaining.min(self.config.tick);
            let out = step(&self.world, self.pose, twist.linear, twist.angular, dt);
            self.pose = out.pose;
            self.time += out.elapsed;
            travelled += out.travelled;
            remaining -= dt;
            ticks += 1;
            if self.config.real_time_factor > 0.0 {
                std::thread::sleep(Duration::from_secs_f64(out.elapsed / self.config.real_time_factor));
            }
            if out.blocked {
                blocked = true;
                break;
            }
            if self.config.scan_every > 0 && ticks % self.config.scan_every == 0 && remaining > 1e-12 {
                on_map(self.scan());
            }
        }
        on_map(self.scan());
        DriveOutcome { pose: self.pose, travelled, elapsed: self.time - start_time, blocked, sim_time: self.time }
    }

    /// Renders the frontal view, stores it in the photo buffer and returns it.
    pub fn capture(&mut self) -> Photo {
        let reference = format!("photo-{:04}", self.photos.len() + 1);
        let photo = render_photo(&self.world, self.pose, self.config.photo_width, reference);
        self.photos.push(photo.clone());
        photo
    }
}
