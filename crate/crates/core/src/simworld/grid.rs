use serde::{Deserialize, Serialize};

use super::world::Rect;
use super::LidarScan;

pub const DEFAULT_RESOLUTION: f64 = 0.05;

// Pushes a hit point off the surface into the obstacle it belongs to.
const SURFACE_NUDGE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cell {
    Unknown,
    Free,
    Occupied,
}

impl Cell {
    /// ROS-style occupancy value: -1 unknown, 0 free, 100 occupied.
    pub fn as_i8(self) -> i8 {
        match self {
            Cell::Unknown => -1,
            Cell::Free => 0,
            Cell::Occupied => 100,
        }
    }

    pub fn from_i8(v: i8) -> Option<Self> {
        match v {
            -1 => Some(Cell::Unknown),
            0 => Some(Cell::Free),
            100 => Some(Cell::Occupied),
            _ => None,
        }
    }

    pub fn glyph(self) -> char {
        match self {
            Cell::Unknown => '?',
            Cell::Free => '.',
            Cell::Occupied => '#',
        }
    }
}

/// One changed cell. On the wire: `[ix, iy, value]` with the value as in
/// [`Cell::as_i8`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "(usize, usize, i8)", try_from = "(usize, usize, i8)")]
pub struct CellDelta {
    pub ix: usize,
    pub iy: usize,
    pub cell: Cell,
}

impl From<CellDelta> for (usize, usize, i8) {
    fn from(d: CellDelta) -> Self {
        (d.ix, d.iy, d.cell.as_i8())
    }
}

impl TryFrom<(usize, usize, i8)> for CellDelta {
    type Error = String;

    fn try_from((ix, iy, v): (usize, usize, i8)) -> Result<Self, String> {
        let cell = Cell::from_i8(v).ok_or_else(|| format!("bad cell value {v}"))?;
        Ok(CellDelta { ix, iy, cell })
    }
}

/// Three-state occupancy grid covering a rectangle. Row `iy = 0` is the
/// southern edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyGrid {
    pub resolution: f64,
    pub origin_x: f64,
    pub origin_y: f64,
    pub width: usize,
    pub height: usize,
    cells: Vec<Cell>,
}

impl OccupancyGrid {
    pub fn new(bounds: &Rect, resolution: f64) -> Self {
        assert!(resolution > 0.0, "resolution must be positive");
        let width = (bounds.width() / resolution - 1e-9).ceil().max(1.0) as usize;
        let height = (bounds.height() / resolution - 1e-9).ceil().max(1.0) as usize;
        Self {
            resolution,
            origin_x: bounds.min_x,
            origin_y: bounds.min_y,
            width,
            height,
            cells: vec![Cell::Unknown; width * height],
        }
    }

    /// An all-unknown grid with explicit geometry.
    pub fn blank(origin_x: f64, origin_y: f64, width: usize, height: usize, resolution: f64) -> Self {
        Self { resolution, origin_x, origin_y, width, height, cells: vec![Cell::Unknown; width * height] }
    }

    pub fn get(&self, ix: usize, iy: usize) -> Cell {
        self.cells[iy * self.width + ix]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Cell containing a world point, or `None` outside the grid.
    pub fn cell_of(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fx = ((x - self.origin_x) / self.resolution).floor();
        let fy = ((y - self.origin_y) / self.resolution).floor();
        if fx < 0.0 || fy < 0.0 || fx >= self.width as f64 || fy >= self.height as f64 {
            return None;
        }
        Some((fx as usize, fy as usize))
    }

    fn clamped_cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        let fx = ((x - self.origin_x) / self.resolution).floor();
        let fy = ((y - self.origin_y) / self.resolution).floor();
        (fx.clamp(0.0, (self.width - 1) as f64) as usize, fy.clamp(0.0, (self.height - 1) as f64) as usize)
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            self.origin_x + (ix as f64 + 0.5) * self.resolution,
            self.origin_y + (iy as f64 + 0.5) * self.resolution,
        )
    }

    /// Sets a cell, returning a delta if it changed. Occupied cells stay occupied.
    fn mark(&mut self, ix: usize, iy: usize, cell: Cell, deltas: &mut Vec<CellDelta>) {
        let slot = &mut self.cells[iy * self.width + ix];
        let next = match (*slot, cell) {
            (Cell::Occupied, _) => Cell::Occupied,
            (_, c) => c,
        };
        if next != *slot {
            *slot = next;
            deltas.push(CellDelta { ix, iy, cell: next });
        }
    }

    /// Applies remote deltas verbatim (used by subscribers folding `ui.map`).
    pub fn apply(&mut self, delta: &CellDelta) -> bool {
        if delta.ix >= self.width || delta.iy >= self.height {
            return false;
        }
        self.cells[delta.iy * self.width + delta.ix] = delta.cell;
        true
    }

    pub fn count(&self, cell: Cell) -> usize {
        self.cells.iter().filter(|c| **c == cell).count()
    }

    /// Text raster, north row first.
    pub fn render(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for iy in (0..self.height).rev() {
            out.extend((0..self.width).map(|ix| self.get(ix, iy).glyph()));
            out.push('\n');
        }
        out
    }

    /// Every cell as a delta, for snapshots.
    pub fn snapshot(&self) -> Vec<CellDelta> {
        (0..self.height)
            .flat_map(|iy| (0..self.width).map(move |ix| (ix, iy)))
            .filter(|&(ix, iy)| self.get(ix, iy) != Cell::Unknown)
            .map(|(ix, iy)| CellDelta { ix, iy, cell: self.get(ix, iy) })
            .collect()
    }
}

/// Marks cells traversed by each beam free and the cell of each hit occupied.
/// Returns the cells that changed.
pub fn update_map(grid: &mut OccupancyGrid, scan: &LidarScan) -> Vec<CellDelta> {
    let mut deltas = Vec::new();
    let (x0, y0) = (scan.pose.x, scan.pose.y);
    for (i, (&angle, &range)) in scan.angles.iter().zip(&scan.ranges).enumerate() {
        let bearing = scan.pose.theta + angle;
        let (dx, dy) = (bearing.cos(), bearing.sin());
        let hit = scan.is_hit(i);
        let end_cell = hit.then(|| {
            grid.clamped_cell_of(x0 + dx * (range + SURFACE_NUDGE), y0 + dy * (range + SURFACE_NUDGE))
        });
        for (ix, iy) in traverse(grid, x0, y0, dx, dy, range) {
            if Some((ix, iy)) != end_cell {
                grid.mark(ix, iy, Cell::Free, &mut deltas);
            }
        }
        if let Some((ix, iy)) = end_cell {
            grid.mark(ix, iy, Cell::Occupied, &mut deltas);
        }
    }
    deltas
}

/// Cells crossed by the segment from `(x0, y0)` along unit `(dx, dy)` for
/// `length`, in order (grid-walking DDA). Stops at the grid edge.
fn traverse(grid: &OccupancyGrid, x0: f64, y0: f64, dx: f64, dy: f64, length: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let Some((mut ix, mut iy)) = grid.cell_of(x0, y0) else {
        return out;
    };
    let res = grid.resolution;
    let axis = |pos: f64, origin: f64, idx: usize, d: f64| -> (i64, f64, f64) {
        if d > 0.0 {
            let boundary = origin + (idx as f64 + 1.0) * res;
            (1, (boundary - pos) / d, res / d)
        } else if d < 0.0 {
            let boundary = origin + idx as f64 * res;
            (-1, (boundary - pos) / d, -res / d)
        } else {
            (0, f64::INFINITY, f64::INFINITY)
        }
    };
    let (step_x, mut t_max_x, t_delta_x) = axis(x0, grid.origin_x, ix, dx);
    let (step_y, mut t_max_y, t_delta_y) = axis(y0, grid.origin_y, iy, dy);
    loop {
        out.push((ix, iy));
        let t = t_max_x.min(t_max_y);
        if t > length {
            break;
        }
        if t_max_x < t_max_y {
            let next = ix as i64 + step_x;
            if next < 0 || next >= grid.width as i64 {
                break;
            }
            ix = next as usize;
            t_max_x += t_delta_x;
        } else {
            let next = iy as i64 + step_y;
            if next < 0 || next >= grid.height as i64 {
                break;
            }
            iy = next as usize;
            t_max_y += t_delta_y;
        }
    }
    out
}
