//! Seeded random instances.

use rand::Rng;

use crate::arith::{rat, ratio};
use crate::model::{tverberg_number, Instance, Point};
use crate::noise;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distribution {
    /// Integer coordinates in `[-half_width, half_width]`.
    Grid { half_width: i64 },
    /// Coordinates `k / 2^16` in `[0, 1]`.
    UnitCube,
}

impl Default for Distribution {
    fn default() -> Self {
        Distribution::Grid { half_width: 50 }
    }
}

/// `n = (r - 1)(d + 1) + 1` distinct random points, deterministic in `seed`.
pub fn random_instance(d: usize, r: usize, dist: Distribution, seed: u64) -> Instance {
    let n = tverberg_number(d, r);
    let mut rng = noise::rng_for(seed, 7);
    let mut points: Vec<Point> = Vec::with_capacity(n);
    while points.len() < n {
        let p: Point = (0..d)
            .map(|_| match dist {
                Distribution::Grid { half_width } => {
                    rat(rng.random_range(-half_width..=half_width))
                }
                Distribution::UnitCube => ratio(rng.random_range(0..=1 << 16), 1 << 16),
            })
            .collect();
        if !points.contains(&p) {
            points.push(p);
        }
    }
    Instance::new(d, r, points).expect("distinct points of the right count")
}
