#![allow(dead_code)]

use acycle_core::complex::{FilteredComplex, Simplex};
use acycle_core::geometry::{Coords, Point, PointSet};
use acycle_core::stochastic::rng;
use proptest::prelude::*;
use rand::Rng;

pub fn s(v: &[u32]) -> Simplex {
    Simplex::new(v.iter().copied()).unwrap()
}

pub fn planar(pts: &[(f64, f64)]) -> PointSet {
    PointSet::from_coords(2, pts.iter().map(|&(x, y)| [x, y, 0.0])).unwrap()
}

pub fn uniform_points(dim: usize, n: usize, seed: u64) -> PointSet {
    let mut g = rng(seed, 0xfeed);
    let pts = (0..n).map(|i| {
        let mut c = [0.0; 3];
        for x in c.iter_mut().take(dim) {
            *x = g.random::<f64>();
        }
        Point { id: i as u32, coords: c }
    });
    PointSet::new(dim, pts.collect()).unwrap()
}

pub fn points_strategy(dim: usize, lo: usize, hi: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec(prop::array::uniform3(-10.0f64..10.0), lo..hi).prop_map(move |v| {
        let coords = v.into_iter().map(|mut c: Coords| {
            if dim == 2 {
                c[2] = 0.0;
            }
            c
        });
        PointSet::from_coords(dim, coords).unwrap()
    })
}

/// Random abstract complex on `nv` vertices: random edges, then random
/// triangles among the present edges, with injective monotone weights.
pub fn random_complex(nv: u32, max_edges: usize, max_tris: usize, seed: u64) -> FilteredComplex {
    let mut g = rng(seed, 0xc0de);
    let mut entries: Vec<(Simplex, f64)> = (0..nv).map(|v| (Simplex::vertex(v), 0.0)).collect();
    let mut edges = Vec::new();
    let mut all: Vec<(u32, u32)> = (0..nv).flat_map(|a| (a + 1..nv).map(move |b| (a, b))).collect();
    for i in (1..all.len()).rev() {
        let j = g.random_range(0..=i);
        all.swap(i, j);
    }
    for &(a, b) in all.iter().take(max_edges) {
        let w = g.random::<f64>();
        edges.push(((a, b), w));
        entries.push((s(&[a, b]), w));
    }
    let w_of = |a: u32, b: u32| edges.iter().find(|e| e.0 == (a.min(b), a.max(b))).map(|e| e.1);
    let mut tris = 0;
    'outer: for a in 0..nv {
        for b in a + 1..nv {
            for c in b + 1..nv {
                if tris >= max_tris {
                    break 'outer;
                }
                if let (Some(x), Some(y), Some(z)) = (w_of(a, b), w_of(a, c), w_of(b, c)) {
                    if g.random::<f64>() < 0.5 {
                        let w = x.max(y).max(z) + g.random::<f64>();
                        entries.push((s(&[a, b, c]), w));
                        tris += 1;
                    }
                }
            }
        }
    }
    FilteredComplex::new(entries).unwrap()
}
