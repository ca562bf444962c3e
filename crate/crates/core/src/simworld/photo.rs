use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::lidar::cast_ray;
use super::{Pose, World};

/// Horizontal field of view of the frontal camera.
pub const PHOTO_FOV: f64 = FRAC_PI_2;
/// Depth reported for columns that see nothing.
pub const PHOTO_MAX_DEPTH: f64 = 10.0;

/// A frontal view rendered column by column: for each column the distance
/// to, and label of, the nearest surface along its bearing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Photo {
    pub reference: String,
    pub pose: Pose,
    /// Column depths, left to right, meters.
    pub depths: Vec<f64>,
    pub labels: Vec<Option<String>>,
}

impl Photo {
    pub fn width(&self) -> usize {
        self.depths.len()
    }

    pub fn height(&self) -> usize {
        (self.width() * 3 / 4).max(1)
    }

    /// Bearing of column `i` relative to the heading, leftmost first.
    pub fn column_bearing(i: usize, width: usize) -> f64 {
        PHOTO_FOV / 2.0 - (i as f64 + 0.5) * PHOTO_FOV / width as f64
    }

    /// Binary PGM (`P5`), 8-bit. Nearer surfaces are brighter and taller.
    pub fn to_pgm(&self) -> Vec<u8> {
        let (w, h) = (self.width(), self.height());
        let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
        let mut pixels = vec![0u8; w * h];
        let horizon = h as f64 / 2.0;
        for (col, &depth) in self.depths.iter().enumerate() {
            let half = if depth >= PHOTO_MAX_DEPTH { 0.0 } else { (horizon * 0.5 / depth).min(horizon) };
            let shade = (230.0 * (1.0 - depth / PHOTO_MAX_DEPTH)).clamp(0.0, 230.0) as u8 + 25;
            for row in 0..h {
                let y = row as f64 + 0.5;
                let px = if (y - horizon).abs() <= half {
                    shade
                } else if y > horizon {
                    60
                } else {
                    10
                };
                pixels[row * w + col] = px;
            }
        }
        out.extend_from_slice(&pixels);
        out
    }

    /// Label sidecar: one `column<TAB>depth<TAB>label` line per column, `-` for none.
    pub fn label_sidecar(&self) -> String {
        let mut s = String::from("# column\tdepth_m\tlabel\n");
        for (i, (d, l)) in self.depths.iter().zip(&self.labels).enumerate() {
            let _ = writeln!(s, "{i}\t{d:.3}\t{}", l.as_deref().unwrap_or("-"));
        }
        s
    }

    /// Distinct labels in view, left to right.
    pub fn visible_labels(&self) -> Vec<&str> {
        let mut seen: Vec<&str> = Vec::new();
        for l in self.labels.iter().flatten() {
            if !seen.contains(&l.as_str()) {
                seen.push(l);
            }
        }
        seen
    }
}

pub fn render_photo(world: &World, pose: Pose, width: usize, reference: impl Into<String>) -> Photo {
    let width = width.max(1);
    let (depths, labels) = (0..width)
        .map(|i| {
            let bearing = pose.theta + Photo::column_bearing(i, width);
            let hit = cast_ray(world, pose.x, pose.y, bearing, PHOTO_MAX_DEPTH);
            (hit.range, hit.label.map(str::to_string))
        })
        .unzip();
    Photo { reference: reference.into(), pose, depths, labels }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open_space_is_max_depth() {
        let world = World::bundled("open").unwrap();
        let p = render_photo(&world, Pose::default(), 32, "p");
        assert!(p.depths.iter().all(|d| *d == PHOTO_MAX_DEPTH));
        assert!(p.labels.iter().all(Option::is_none));
    }

    #[test]
    fn cone_columns_carry_label() {
        let world = World::parse("bounds 0 5 20 15\nstart 2 10 0\nobstacle 5 9.8 5.4 10.2 orange cone").unwrap();
        let p = render_photo(&world, world.start, 64, "p");
        let mid = p.width() / 2;
        assert_eq!(p.labels[mid].as_deref(), Some("orange cone"));
        assert_eq!(p.labels[0].as_deref(), Some("wall"));
        assert_eq!(p.visible_labels(), vec!["wall", "orange cone"]);
    }

    #[test]
    fn pgm_header_and_size() {
        let world = World::empty_room(4.0);
        let p = render_photo(&world, Pose::default(), 16, "p");
        let pgm = p.to_pgm();
        let header = b"P5\n16 12\n255\n";
        assert!(pgm.starts_with(header));
        assert_eq!(pgm.len(), header.len() + 16 * 12);
        assert_eq!(p.label_sidecar().lines().count(), 17);
    }
}
