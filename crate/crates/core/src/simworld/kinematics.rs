use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::World;

/// Gap kept between the robot's edge and an obstacle when a move is cut short.
pub const STANDOFF: f64 = 0.01;

// Smallest distance advanced per collision probe, meters.
const MIN_PROBE: f64 = 1e-4;
const CONTACT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Heading in (-pi, pi].
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta: normalize_angle(theta) }
    }

    pub fn distance_to(&self, other: &Pose) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Wraps an angle into (-pi, pi].
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Smallest absolute difference between two headings.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    normalize_angle(a - b).abs()
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Exact constant-twist integration, ignoring obstacles.
///
/// Uses `sin(a + b) - sin(a) = 2 cos(a + b/2) sin(b/2)` so the arc and the
/// straight-line case share one numerically stable expression.
pub fn arc_pose(pose: Pose, linear: f64, angular: f64, dt: f64) -> Pose {
    let half = angular * dt / 2.0;
    let chord = linear * dt * sinc(half);
    let mid = pose.theta + half;
    Pose::new(pose.x + chord * mid.cos(), pose.y + chord * mid.sin(), pose.theta + angular * dt)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub pose: Pose,
    /// Time actually simulated; shorter than requested when blocked.
    pub elapsed: f64,
    /// Path length covered by the robot centre.
    pub travelled: f64,
    pub blocked: bool,
}

/// Advances `pose` under a constant twist for `dt`, stopping short of any
/// obstacle (inflated by the footprint) with [`STANDOFF`] to spare.
pub fn step(world: &World, pose: Pose, linear: f64, angular: f64, dt: f64) -> StepOutcome {
    let speed = linear.abs();
    if dt <= 0.0 || speed == 0.0 {
        let dt = dt.max(0.0);
        return StepOutcome { pose: arc_pose(pose, 0.0, angular, dt), elapsed: dt, travelled: 0.0, blocked: false };
    }
    let clearance_at = |t: f64| {
        let p = arc_pose(pose, linear, angular, t);
        world.clearance(p.x, p.y)
    };
    // A robot already inside the standoff band may not get any closer.
    let floor = STANDOFF.min(world.clearance(pose.x, pose.y)) - CONTACT_EPS;

    // Conservative advancement: clearance is 1-Lipschitz in position and the
    // centre moves at most `speed * dt`, so stepping by margin/speed never
    // skips over a contact.
    let mut t = 0.0;
    let mut margin = clearance_at(0.0) - floor;
    while t < dt {
        let next = (t + (margin.max(MIN_PROBE) / speed)).min(dt);
        let next_margin = clearance_at(next) - floor;
        if next_margin < 0.0 {
            let (mut lo, mut hi) = (t, next);
            for _ in 0..64 {
                let mid = 0.5 * (lo + hi);
                if clearance_at(mid) >= floor {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return StepOutcome {
                pose: arc_pose(pose, linear, angular, lo),
                elapsed: lo,
                travelled: speed * lo,
                blocked: true,
            };
        }
        t = next;
        margin = next_margin;
    }
    StepOutcome { pose: arc_pose(pose, linear, angular, dt), elapsed: dt, travelled: speed * dt, blocked: false }
}
