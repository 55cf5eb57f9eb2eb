//! Alpha-weighted Delaunay complexes, persistence pairings and minimal
//! spanning acycles on finite point sets in the plane and in space.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches files,
//! threads or the command line lives in the companion `acycle` crate.
//!
//! The pipeline is:
//!
//! 1. [`geometry::delaunay`] triangulates a [`geometry::PointSet`] with
//!    exact orientation and in-sphere predicates.
//! 2. [`geometry::delaunay_complex`] turns the triangulation into a
//!    [`complex::FilteredComplex`] carrying Alpha (or Delaunay–Čech) weights.
//! 3. [`persistence::reduce`] labels every simplex positive or negative.
//! 4. [`msa`] reads minimal spanning acycles and the death/birth/lifetime
//!    sums off the labels.
//!
//! [`oracle`] holds brute-force ground truth used by the test suites, and
//! [`stochastic`] the Poisson and configuration samplers.
#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod complex;
pub mod geometry;
pub mod msa;
pub mod numeric;
pub mod oracle;
pub mod persistence;
pub mod stochastic;

pub use complex::{FilteredComplex, Simplex};
pub use geometry::{Point, PointSet, WeightMode};
pub use msa::{MsaResult, PhiSpec};
pub use persistence::{Label, PersistencePairing};
