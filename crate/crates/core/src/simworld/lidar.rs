use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::world::BOUNDARY_LABEL;
use super::{Pose, World};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LidarConfig {
    pub beams: usize,
    /// Field of view, radians, centred on the heading.
    pub fov: f64,
    /// Meters.
    pub max_range: f64,
}

impl Default for LidarConfig {
    fn default() -> Self {
        Self { beams: 360, fov: TAU, max_range: 10.0 }
    }
}

impl LidarConfig {
    /// Bearings relative to the heading. A full circle is split into `beams`
    /// equal sectors; a partial fov includes both edges.
    pub fn bearings(&self) -> Vec<f64> {
        let n = self.beams;
        if n == 0 {
            return Vec::new();
        }
        let full = (self.fov - TAU).abs() < 1e-12;
        let spacing = if full || n == 1 { self.fov / n as f64 } else { self.fov / (n - 1) as f64 };
        let first = if n == 1 && !full { 0.0 } else { -self.fov / 2.0 };
        (0..n).map(|i| first + spacing * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LidarScan {
    /// Relative to `pose.theta`.
    pub angles: Vec<f64>,
    pub ranges: Vec<f64>,
    pub max_range: f64,
    pub pose: Pose,
}

impl LidarScan {
    /// True when beam `i` hit something inside `max_range`.
    pub fn is_hit(&self, i: usize) -> bool {
        self.ranges[i] < self.max_range
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayHit<'w> {
    pub range: f64,
    /// `None` when nothing was hit within range.
    pub label: Option<&'w str>,
}

/// Distance along a world-frame bearing to the nearest obstacle or boundary, clipped.
pub fn cast_ray<'w>(world: &'w World, x: f64, y: f64, bearing: f64, max_range: f64) -> RayHit<'w> {
    let (dx, dy) = (bearing.cos(), bearing.sin());
    let mut best = world.bounds.ray_exit(x, y, dx, dy);
    let mut label = Some(BOUNDARY_LABEL);
    for o in &world.obstacles {
        if let Some(t) = o.rect.ray_entry(x, y, dx, dy) {
            if t < best {
                best = t;
                label = Some(o.label.as_str());
            }
        }
    }
    if best >= max_range {
        RayHit { range: max_range, label: None }
    } else {
        RayHit { range: best, label }
    }
}

pub fn lidar_scan(world: &World, pose: Pose, config: &LidarConfig) -> LidarScan {
    let angles = config.bearings();
    let ranges = angles
        .iter()
        .map(|a| cast_ray(world, pose.x, pose.y, pose.theta + a, config.max_range).range)
        .collect();
    LidarScan { angles, ranges, max_range: config.max_range, pose }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centre_of_empty_room() {
        let world = World::empty_room(4.0);
        let scan = lidar_scan(&world, Pose::default(), &LidarConfig::default());
        assert_eq!(scan.ranges.len(), 360);
        let zero = scan.angles.iter().position(|a| a.abs() < 1e-12).unwrap();
        assert!((scan.ranges[zero] - 2.0).abs() < 1e-12);
        assert!(scan.ranges.iter().all(|r| *r > 0.0 && *r <= 10.0));
    }

    #[test]
    fn clipped_at_max_range() {
        let world = World::bundled("open").unwrap();
        let cfg = LidarConfig { max_range: 5.0, ..Default::default() };
        let scan = lidar_scan(&world, Pose::default(), &cfg);
        assert!(scan.ranges.iter().all(|r| *r == 5.0));
        assert!((0..scan.ranges.len()).all(|i| !scan.is_hit(i)));
    }

    #[test]
    fn partial_fov_includes_edges() {
        let cfg = LidarConfig { beams: 3, fov: std::f64::consts::PI, max_range: 1.0 };
        let b = cfg.bearings();
        assert!((b[0] + std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(b[1].abs() < 1e-12);
        assert!((b[2] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn labels_propagate() {
        let world = World::bundled("wall_ahead").unwrap();
        let hit = cast_ray(&world, 1.0, 2.0, 0.0, 10.0);
        assert_eq!(hit.label, Some("wall"));
        assert!((hit.range - 1.0).abs() < 1e-12);
        let behind = cast_ray(&world, 1.0, 2.0, std::f64::consts::PI, 10.0);
        assert!((behind.range - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic() {
        let world = World::bundled("apartment").unwrap();
        let a = lidar_scan(&world, world.start, &LidarConfig::default());
        let b = lidar_scan(&world, world.start, &LidarConfig::default());
        assert_eq!(a, b);
    }
}
