//! Points, circumspheres, Delaunay triangulations in the plane and in space,
//! and Alpha / Delaunay–Čech weights on the resulting complexes.

mod alpha;
mod ball;
mod delaunay;
mod general;
pub mod predicates;

use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::complex::{ComplexError, VertexId};

pub use alpha::{alpha_weight, delaunay_complex, weighted_complex, WeightMode};
pub use ball::{circumsphere, min_enclosing_ball, Ball};
pub use delaunay::{delaunay, Triangulation};
pub use general::{is_general_position, GeneralPosition};

/// Coordinates in space; planar points keep `z = 0`.
pub type Coords = [f64; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DegeneracyKind {
    Duplicate,
    AffinelyDependent,
    Cospherical,
}

impl fmt::Display for DegeneracyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DegeneracyKind::Duplicate => "duplicate points",
            DegeneracyKind::AffinelyDependent => "affinely dependent points",
            DegeneracyKind::Cospherical => "cospherical points",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum GeometryError {
    #[error("{kind}: ids {ids:?}")]
    Degenerate { kind: DegeneracyKind, ids: Vec<VertexId> },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("dimension {0} is not supported (expected 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("point {0} has a non-finite coordinate")]
    NonFinite(VertexId),
    #[error("point id {0} used twice")]
    DuplicateId(VertexId),
    #[error("point {0} has {1} coordinates")]
    WrongArity(VertexId, usize),
    #[error("empty input")]
    Empty,
    #[error("simplex {0} is not in the Delaunay complex")]
    NotInComplex(crate::complex::Simplex),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

impl GeometryError {
    pub fn is_degeneracy(&self) -> bool {
        matches!(self, GeometryError::Degenerate { .. })
    }

    pub(crate) fn degenerate(kind: DegeneracyKind, mut ids: Vec<VertexId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        GeometryError::Degenerate { kind, ids }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub id: VertexId,
    pub coords: Coords,
}

impl Point {
    pub fn new2(id: VertexId, x: f64, y: f64) -> Self {
        Point { id, coords: [x, y, 0.0] }
    }

    pub fn new3(id: VertexId, x: f64, y: f64, z: f64) -> Self {
        Point { id, coords: [x, y, z] }
    }

    /// Builds a point from a slice of 2 or 3 coordinates.
    pub fn from_slice(id: VertexId, c: &[f64]) -> Result<Self, GeometryError> {
        match c.len() {
            2 => Ok(Point::new2(id, c[0], c[1])),
            3 => Ok(Point::new3(id, c[0], c[1], c[2])),
            n => Err(GeometryError::WrongArity(id, n)),
        }
    }
}

/// A finite point set in the plane (`dim == 2`) or in space (`dim == 3`),
/// kept sorted by id.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(dim: usize, mut points: Vec<Point>) -> Result<Self, GeometryError> {
        if !(2..=3).contains(&dim) {
            return Err(GeometryError::UnsupportedDimension(dim));
        }
        for p in &points {
            if !p.coords.iter().all(|c| c.is_finite()) {
                return Err(GeometryError::NonFinite(p.id));
            }
            if dim == 2 && p.coords[2] != 0.0 {
                return Err(GeometryError::WrongArity(p.id, 3));
            }
        }
        points.sort_by_key(|p| p.id);
        if let Some(w) = points.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(GeometryError::DuplicateId(w[0].id));
        }
        Ok(PointSet { dim, points })
    }

    /// Assigns ids `0..n` in input order.
    pub fn from_coords<I: IntoIterator<Item = Coords>>(dim: usize, coords: I) -> Result<Self, GeometryError> {
        let points = coords
            .into_iter()
            .enumerate()
            .map(|(i, c)| Point { id: i as VertexId, coords: c })
            .collect();
        PointSet::new(dim, points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, id: VertexId) -> Option<&Point> {
        self.points
            .binary_search_by_key(&id, |p| p.id)
            .ok()
            .map(|i| &self.points[i])
    }

    pub fn coords(&self, id: VertexId) -> Option<&Coords> {
        self.get(id).map(|p| &p.coords)
    }

    pub fn ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.points.iter().map(|p| p.id)
    }

    /// Adds one point; its id must be new.
    pub fn with_point(&self, p: Point) -> Result<PointSet, GeometryError> {
        let mut pts = self.points.clone();
        pts.push(p);
        PointSet::new(self.dim, pts)
    }

    /// Points for which `keep` holds, ids preserved.
    pub fn filtered<F: FnMut(&Point) -> bool>(&self, mut keep: F) -> PointSet {
        PointSet {
            dim: self.dim,
            points: self.points.iter().filter(|p| keep(p)).copied().collect(),
        }
    }

    /// Largest id plus one (0 for the empty set).
    pub fn next_id(&self) -> VertexId {
        self.points.last().map_or(0, |p| p.id + 1)
    }
}

pub(crate) fn dist2(a: &Coords, b: &Coords) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

/// Euclidean distance.
pub fn distance(a: &Coords, b: &Coords) -> f64 {
    crate::numeric::sqrt(dist2(a, b))
}
