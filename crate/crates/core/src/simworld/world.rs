//! World geometry and the plain-text world file format.
//!
//! ```text
//! # comment
//! name apartment
//! bounds <min_x> <min_y> <max_x> <max_y>
//! footprint <radius_m>
//! start <x> <y> <heading_deg>
//! obstacle <min_x> <min_y> <max_x> <max_y> <label words...>
//! ```

use serde::{Deserialize, Serialize};

use super::{Pose, SimError};

/// Circumscribing radius of a 20in x 17in base, rounded up.
pub const DEFAULT_FOOTPRINT: f64 = 0.26;

/// Label reported for the world boundary.
pub const BOUNDARY_LABEL: &str = "wall";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Rect {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Result<Self, SimError> {
        let finite = [min_x, min_y, max_x, max_y].iter().all(|v| v.is_finite());
        if !finite || min_x >= max_x || min_y >= max_y {
            return Err(SimError::World(format!("degenerate rectangle {min_x} {min_y} {max_x} {max_y}")));
        }
        Ok(Self { min_x, min_y, max_x, max_y })
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.min_x && x <= self.max_x && y >= self.min_y && y <= self.max_y
    }

    fn within(&self, outer: &Rect) -> bool {
        self.min_x >= outer.min_x && self.max_x <= outer.max_x && self.min_y >= outer.min_y && self.max_y <= outer.max_y
    }

    /// Euclidean distance from a point to the rectangle; zero inside.
    pub fn distance_to(&self, x: f64, y: f64) -> f64 {
        let dx = (self.min_x - x).max(0.0).max(x - self.max_x);
        let dy = (self.min_y - y).max(0.0).max(y - self.max_y);
        dx.hypot(dy)
    }

    /// Distance from an inside point to the nearest edge; negative outside.
    pub fn inner_clearance(&self, x: f64, y: f64) -> f64 {
        (x - self.min_x).min(self.max_x - x).min(y - self.min_y).min(self.max_y - y)
    }

    /// Entry distance of the ray `origin + t * dir` into the rectangle, for `t >= 0`.
    pub fn ray_entry(&self, ox: f64, oy: f64, dx: f64, dy: f64) -> Option<f64> {
        let (mut t_min, mut t_max) = (0.0f64, f64::INFINITY);
        for (o, d, lo, hi) in [(ox, dx, self.min_x, self.max_x), (oy, dy, self.min_y, self.max_y)] {
            if d == 0.0 {
                if o < lo || o > hi {
                    return None;
                }
            } else {
                let (a, b) = ((lo - o) / d, (hi - o) / d);
                let (near, far) = if a < b { (a, b) } else { (b, a) };
                t_min = t_min.max(near);
                t_max = t_max.min(far);
                if t_min > t_max {
                    return None;
                }
            }
        }
        Some(t_min)
    }

    /// Exit distance of a ray starting inside the rectangle.
    pub fn ray_exit(&self, ox: f64, oy: f64, dx: f64, dy: f64) -> f64 {
        let mut t = f64::INFINITY;
        for (o, d, lo, hi) in [(ox, dx, self.min_x, self.max_x), (oy, dy, self.min_y, self.max_y)] {
            if d > 0.0 {
                t = t.min((hi - o) / d);
            } else if d < 0.0 {
                t = t.min((lo - o) / d);
            }
        }
        t.max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub rect: Rect,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct World {
    pub name: String,
    pub bounds: Rect,
    pub obstacles: Vec<Obstacle>,
    /// Robot radius, meters.
    pub footprint: f64,
    pub start: Pose,
}

impl World {
    pub fn new(
        name: impl Into<String>,
        bounds: Rect,
        obstacles: Vec<Obstacle>,
        footprint: f64,
        start: Pose,
    ) -> Result<Self, SimError> {
        if !(footprint.is_finite() && footprint > 0.0) {
            return Err(SimError::World(format!("footprint must be positive, got {footprint}")));
        }
        if let Some(o) = obstacles.iter().find(|o| !o.rect.within(&bounds)) {
            return Err(SimError::World(format!("obstacle {:?} lies outside the bounds", o.label)));
        }
        let world = Self { name: name.into(), bounds, obstacles, footprint, start };
        if world.clearance(start.x, start.y) < 0.0 {
            return Err(SimError::World(format!("start {start:?} overlaps an obstacle")));
        }
        Ok(world)
    }

    /// An empty square room centred on the origin.
    pub fn empty_room(side: f64) -> Self {
        let h = side / 2.0;
        let bounds = Rect::new(-h, -h, h, h).expect("positive side");
        Self::new("empty", bounds, Vec::new(), DEFAULT_FOOTPRINT, Pose::default()).expect("valid room")
    }

    /// Distance from the robot's edge to the nearest obstacle or boundary
    /// when its centre is at `(x, y)`. Negative means overlap.
    pub fn clearance(&self, x: f64, y: f64) -> f64 {
        let mut d = self.bounds.inner_clearance(x, y);
        for o in &self.obstacles {
            d = d.min(o.rect.distance_to(x, y));
        }
        d - self.footprint
    }

    pub fn is_free(&self, x: f64, y: f64) -> bool {
        self.bounds.contains(x, y) && self.obstacles.iter().all(|o| o.rect.distance_to(x, y) > 0.0)
    }

    pub fn parse(text: &str) -> Result<Self, SimError> {
        let mut name = String::from("unnamed");
        let mut bounds = None;
        let mut footprint = DEFAULT_FOOTPRINT;
        let mut start = None;
        let mut obstacles = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at = |msg: &str| SimError::World(format!("line {}: {msg}: {line:?}", idx + 1));
            let mut fields = line.split_ascii_whitespace();
            let keyword = fields.next().unwrap_or_default();
            let rest: Vec<&str> = fields.collect();
            let nums = |n: usize| -> Result<Vec<f64>, SimError> {
                if rest.len() < n {
                    return Err(at("too few fields"));
                }
                rest[..n].iter().map(|s| s.parse::<f64>().map_err(|_| at("bad number"))).collect()
            };
            match keyword {
                "name" if !rest.is_empty() => name = rest.join(" "),
                "bounds" if rest.len() == 4 => {
                    let v = nums(4)?;
                    bounds = Some(Rect::new(v[0], v[1], v[2], v[3])?);
                }
                "footprint" if rest.len() == 1 => footprint = nums(1)?[0],
                "start" if rest.len() == 3 => {
                    let v = nums(3)?;
                    start = Some(Pose::new(v[0], v[1], v[2].to_radians()));
                }
                "obstacle" if rest.len() >= 5 => {
                    let v = nums(4)?;
                    obstacles.push(Obstacle {
                        rect: Rect::new(v[0], v[1], v[2], v[3])?,
                        label: rest[4..].join(" "),
                    });
                }
                _ => return Err(at("unrecognised record")),
            }
        }
        let bounds = bounds.ok_or_else(|| SimError::World("missing bounds record".into()))?;
        let start = start.unwrap_or_else(|| {
            Pose::new((bounds.min_x + bounds.max_x) / 2.0, (bounds.min_y + bounds.max_y) / 2.0, 0.0)
        });
        Self::new(name, bounds, obstacles, footprint, start)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::World(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Names of the worlds shipped with the crate.
    pub const BUNDLED: [&'static str; 4] = ["apartment", "alley", "wall_ahead", "open"];

    pub fn bundled(name: &str) -> Result<Self, SimError> {
        let text = match name {
            "apartment" => include_str!("../../assets/worlds/apartment.world"),
            "alley" => include_str!("../../assets/worlds/alley.world"),
            "wall_ahead" => include_str!("../../assets/worlds/wall_ahead.world"),
            "open" => include_str!("../../assets/worlds/open.world"),
            other => return Err(SimError::World(format!("no bundled world named {other:?}"))),
        };
        Self::parse(text)
    }

    /// A bundled world name, or otherwise a path to a world file.
    pub fn resolve(name_or_path: &str) -> Result<Self, SimError> {
        if Self::BUNDLED.contains(&name_or_path) {
            Self::bundled(name_or_path)
        } else {
            Self::load(std::path::Path::new(name_or_path))
        }
    }
}
