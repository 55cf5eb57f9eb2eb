//! Seeded randomness, Poisson samples in boxes, and the perturbed
//! configurations used to bound add-one costs from below.

mod config;

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::geometry::{Coords, Point, PointSet};
use crate::numeric::powf;

pub use config::{build_config, sample_config, Config, ConfigError, ConfigSpec, Region};

/// Generator for replicate `replicate` of a run seeded with `seed`.
///
/// ChaCha streams are independent, so replicate `i` draws the same numbers
/// whatever order replicates are scheduled in.
pub fn rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(replicate);
    r
}

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub dim: usize,
    pub lo: Coords,
    pub hi: Coords,
}

impl Aabb {
    pub fn new(dim: usize, lo: Coords, hi: Coords) -> Self {
        Aabb { dim, lo, hi }
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim).map(|k| self.hi[k] - self.lo[k]).product()
    }

    /// Half-open membership `lo ≤ x < hi` per axis.
    pub fn contains(&self, p: &Coords) -> bool {
        (0..self.dim).all(|k| self.lo[k] <= p[k] && p[k] < self.hi[k])
    }

    pub fn contains_origin(&self) -> bool {
        self.contains(&[0.0; 3])
    }

    pub fn uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Coords {
        let mut c = [0.0; 3];
        for k in 0..self.dim {
            c[k] = self.lo[k] + (self.hi[k] - self.lo[k]) * rng.random::<f64>();
        }
        c
    }
}

/// Cube of volume `n` centered at `anchor`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub n: f64,
    pub dim: usize,
    pub anchor: Coords,
}

impl Window {
    /// The window centered at the origin.
    pub fn centered(n: f64, dim: usize) -> Self {
        Window { n, dim, anchor: [0.0; 3] }
    }

    pub fn side(&self) -> f64 {
        powf(self.n, 1.0 / self.dim as f64)
    }

    pub fn volume(&self) -> f64 {
        self.n
    }

    pub fn bounds(&self) -> Aabb {
        let h = self.side() / 2.0;
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for k in 0..self.dim {
            lo[k] = self.anchor[k] - h;
            hi[k] = self.anchor[k] + h;
        }
        Aabb::new(self.dim, lo, hi)
    }
}

/// Poisson process of intensity `lambda` in `region`: a Poisson count, then
/// that many independent uniform points with ids `0..N`.
pub fn sample_poisson_with<R: Rng + ?Sized>(lambda: f64, region: &Aabb, rng: &mut R) -> PointSet {
    let mean = lambda * region.volume();
    let count = if mean > 0.0 {
        Poisson::new(mean).expect("finite positive mean").sample(rng) as usize
    } else {
        0
    };
    let points: Vec<Point> = (0..count)
        .map(|i| Point {
            id: i as u32,
            coords: region.uniform(rng),
        })
        .collect();
    PointSet::new(region.dim, points).expect("finite coordinates, unique ids")
}

/// [`sample_poisson_with`] on the generator for `(seed, replicate)`.
pub fn sample_poisson(lambda: f64, region: &Aabb, seed: u64, replicate: u64) -> PointSet {
    sample_poisson_with(lambda, region, &mut rng(seed, replicate))
}

/// Points of `points` inside `region`, ids preserved.
pub fn restrict(points: &PointSet, region: &Aabb) -> PointSet {
    points.filtered(|p| region.contains(&p.coords))
}
