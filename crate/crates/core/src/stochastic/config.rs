use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use thiserror::Error;

use super::rng;
use crate::geometry::{Coords, Point, PointSet};
use crate::numeric::sqrt;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ConfigError {
    #[error("dimension {0} is not supported (expected 2 or 3)")]
    Dimension(usize),
    #[error("radius r must be positive and finite (got {0})")]
    Radius(f64),
    #[error("outer radius {rho} must exceed {min}")]
    OuterRadius { rho: f64, min: f64 },
    #[error("perturbation {eps} must be non-negative and below {max}")]
    Perturbation { eps: f64, max: f64 },
}

/// Parameters of the inner/outer simplex configuration: inner radius `r`,
/// outer radius `rho`, perturbation radius `eps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfigSpec {
    pub d: usize,
    pub r: f64,
    pub rho: f64,
    pub eps: f64,
}

impl ConfigSpec {
    /// Defaults: `rho = 21 d r`, `eps = r / 50`.
    pub fn new(d: usize, r: f64) -> Result<Self, ConfigError> {
        let spec = ConfigSpec {
            d,
            r,
            rho: 21.0 * d as f64 * r,
            eps: r / 50.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_eps(mut self, eps: f64) -> Result<Self, ConfigError> {
        self.eps = eps;
        self.validate()?;
        Ok(self)
    }

    pub fn with_rho(mut self, rho: f64) -> Result<Self, ConfigError> {
        self.rho = rho;
        self.validate()?;
        Ok(self)
    }

    /// Strict upper bound on `eps`.
    pub fn max_eps(&self) -> f64 {
        if self.d == 2 {
            self.r / 40.0
        } else {
            self.r / (8.0 * (self.d as f64 + 2.0))
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(2..=3).contains(&self.d) {
            return Err(ConfigError::Dimension(self.d));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(ConfigError::Radius(self.r));
        }
        let min = 20.0 * self.d as f64 * self.r;
        if !(self.rho > min && self.rho.is_finite()) {
            return Err(ConfigError::OuterRadius { rho: self.rho, min });
        }
        let max = self.max_eps();
        if !(self.eps >= 0.0 && self.eps < max) {
            return Err(ConfigError::Perturbation { eps: self.eps, max });
        }
        Ok(())
    }
}

/// Sampling region around an anchor: a closed ball, optionally cut down to
/// the cone with apex at the anchor, unit axis `axis` and half-angle
/// `half_angle`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region {
    pub center: Coords,
    pub radius: f64,
    pub cone: Option<(Coords, f64)>,
}

impl Region {
    pub fn contains(&self, y: &Coords) -> bool {
        let v = [y[0] - self.center[0], y[1] - self.center[1], y[2] - self.center[2]];
        let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if n2 > self.radius * self.radius {
            return false;
        }
        match self.cone {
            None => true,
            Some(_) if n2 == 0.0 => true,
            Some((axis, half)) => {
                let cos = (v[0] * axis[0] + v[1] * axis[1] + v[2] * axis[2]) / sqrt(n2);
                cos >= libm::cos(half)
            }
        }
    }

    /// Uniform point of the region by rejection from the bounding cube.
    pub fn sample<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> Coords {
        if self.radius == 0.0 {
            return self.center;
        }
        loop {
            let mut y = self.center;
            for c in y.iter_mut().take(dim) {
                *c += self.radius * (2.0 * rng.random::<f64>() - 1.0);
            }
            if self.contains(&y) {
                return y;
            }
        }
    }
}

/// Anchors `p_1..p_{d+1}` (a regular simplex on the sphere of radius `r`),
/// then `q_1..q_{d+1}` with `q_i = -rho p_i / |p_i|`, and one region per
/// anchor.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub spec: ConfigSpec,
    pub anchors: Vec<Coords>,
    pub regions: Vec<Region>,
}

fn unit_simplex(d: usize) -> Vec<Coords> {
    if d == 2 {
        let (s, c) = (sqrt(3.0) / 2.0, 0.5);
        alloc::vec![[-s, -c, 0.0], [0.0, 1.0, 0.0], [s, -c, 0.0]]
    } else {
        let a = sqrt(8.0 / 9.0);
        let b = sqrt(2.0 / 9.0);
        let c = sqrt(2.0 / 3.0);
        alloc::vec![[0.0, 0.0, 1.0], [a, 0.0, -1.0 / 3.0], [-b, c, -1.0 / 3.0], [-b, -c, -1.0 / 3.0]]
    }
}

pub fn build_config(spec: ConfigSpec) -> Result<Config, ConfigError> {
    spec.validate()?;
    let d = spec.d;
    let unit = unit_simplex(d);
    let scale = |v: &Coords, s: f64| [v[0] * s, v[1] * s, v[2] * s];
    let mut anchors: Vec<Coords> = unit.iter().map(|u| scale(u, spec.r)).collect();
    anchors.extend(unit.iter().map(|u| scale(u, -spec.rho)));

    let cones: [Coords; 3] = [[-2.0, -1.0, 0.0], [0.0, -1.0, 0.0], [2.0, -1.0, 0.0]];
    let regions = anchors
        .iter()
        .enumerate()
        .map(|(i, &center)| {
            let cone = (d == 2 && i < 3).then(|| {
                let v = cones[i];
                let n = sqrt(v[0] * v[0] + v[1] * v[1]);
                ([v[0] / n, v[1] / n, 0.0], PI / 12.0)
            });
            Region {
                center,
                radius: spec.eps,
                cone,
            }
        })
        .collect();
    Ok(Config { spec, anchors, regions })
}

impl Config {
    /// One point per region; ids are the anchor positions `0..2d+2`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PointSet {
        let points = self
            .regions
            .iter()
            .enumerate()
            .map(|(i, r)| Point {
                id: i as u32,
                coords: r.sample(self.spec.d, rng),
            })
            .collect();
        PointSet::new(self.spec.d, points).expect("finite coordinates")
    }

    /// The unperturbed anchors as a point set.
    pub fn anchor_points(&self) -> PointSet {
        PointSet::from_coords(self.spec.d, self.anchors.iter().copied()).expect("finite coordinates")
    }
}

/// Samples a configuration with the generator for `(seed, 0)`.
pub fn sample_config(spec: ConfigSpec, seed: u64) -> Result<PointSet, ConfigError> {
    Ok(build_config(spec)?.sample(&mut rng(seed, 0)))
}
