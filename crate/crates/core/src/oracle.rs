//! Brute-force ground truth for tests.
//!
//! Nothing here shares code with [`crate::persistence`] or
//! [`crate::complex::homology`]: ranks come from a separate dense bitset
//! elimination and the spanning tree from a separate union–find.

use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;
use thiserror::Error;

use crate::complex::{FilteredComplex, Simplex, VertexId};
use crate::geometry::PointSet;
use crate::numeric::sqrt;

/// Largest number of `k`-faces the exhaustive search accepts.
pub const MAX_FACES: usize = 22;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{count} faces exceed the enumeration cap of {cap}")]
    TooManyFaces { count: usize, cap: usize },
    #[error("spanning acycles of different sizes found ({0} and {1})")]
    UnequalCardinality(usize, usize),
    #[error("no spanning acycle exists")]
    NoAcycle,
}

/// A subset of `k`-faces together with the two Betti numbers that certify
/// it as a spanning acycle.
#[derive(Clone, Debug, PartialEq)]
pub struct AcycleCertificate {
    pub simplices: Vec<Simplex>,
    /// Reduced Betti number in degree `k - 1` of the `(k-1)`-skeleton plus
    /// the subset.
    pub betti_below: usize,
    /// Betti number in degree `k` of the same complex.
    pub betti_top: usize,
    pub weight: f64,
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn zero(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }
    fn xor(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a ^= b;
        }
    }
    fn highest(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .rev()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    }
}

/// Incremental GF(2) basis keyed by leading bit.
struct Basis {
    rows: usize,
    pivots: HashMap<usize, Bits>,
}

impl Basis {
    fn new(rows: usize) -> Self {
        Basis { rows, pivots: HashMap::new() }
    }

    // Adds `v`; returns false if it was dependent.
    fn insert(&mut self, mut v: Bits) -> bool {
        while let Some(h) = v.highest() {
            match self.pivots.get(&h) {
                Some(p) => v.xor(p),
                None => {
                    self.pivots.insert(h, v);
                    return true;
                }
            }
        }
        false
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }
}

fn rank_of(rows: usize, vectors: &[Bits]) -> usize {
    let mut b = Basis::new(rows);
    for v in vectors {
        b.insert(v.clone());
    }
    debug_assert!(b.rank() <= b.rows);
    b.rank()
}

// Boundary columns of the `k`-simplices as bit vectors over the
// `(k-1)`-simplices (an all-ones row stands in for the augmentation at k=0).
fn boundary_vectors(complex: &FilteredComplex, k: usize) -> (usize, Vec<Bits>) {
    if k == 0 {
        let n = complex.filtration_order().iter().filter(|s| s.dim() == 0).count();
        let mut one = Bits::zero(1);
        one.set(0);
        return (1, vec![one; n]);
    }
    let rows: Vec<&Simplex> = complex.filtration_order().iter().filter(|s| s.dim() == k - 1).collect();
    let row_of: HashMap<&Simplex, usize> = rows.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let cols = complex
        .filtration_order()
        .iter()
        .filter(|s| s.dim() == k)
        .map(|s| {
            let mut b = Bits::zero(rows.len());
            for f in s.facets() {
                b.set(row_of[&f]);
            }
            b
        })
        .collect();
    (rows.len(), cols)
}

/// Reduced Betti number computed by dense elimination.
pub fn betti(complex: &FilteredComplex, k: usize) -> usize {
    let n_k = complex.filtration_order().iter().filter(|s| s.dim() == k).count();
    let (r, cols) = boundary_vectors(complex, k);
    let rank_k = if n_k == 0 { 0 } else { rank_of(r, &cols) };
    let (r1, cols1) = boundary_vectors(complex, k + 1);
    n_k - rank_k - rank_of(r1, &cols1)
}

/// Every `k`-spanning acycle of `complex`.
///
/// Subsets are explored depth first in filtration order; a branch is cut as
/// soon as its subset has a nonzero `k`-cycle, since no superset of it can
/// be acyclic. Every surviving subset is then checked against both Betti
/// conditions from scratch.
pub fn enumerate_spanning_acycles(complex: &FilteredComplex, k: usize, max_faces: usize) -> Result<Vec<AcycleCertificate>, OracleError> {
    if k == 0 {
        // the 0-spanning acycle is empty by convention
        return Ok(vec![AcycleCertificate {
            simplices: Vec::new(),
            betti_below: 0,
            betti_top: 0,
            weight: 0.0,
        }]);
    }
    let cap = max_faces.min(MAX_FACES);
    let faces: Vec<(Simplex, f64)> = complex.iter().filter(|(s, _)| s.dim() == k).map(|(s, w)| (s.clone(), w)).collect();
    if faces.len() > cap {
        return Err(OracleError::TooManyFaces { count: faces.len(), cap });
    }
    let skeleton = complex.skeleton(k - 1);
    let target = betti(complex, k - 1);
    let (rows, cols) = boundary_vectors(complex, k);

    let mut out = Vec::new();
    let mut chosen = Vec::new();
    let mut basis_stack: Vec<Basis> = vec![Basis::new(rows)];
    explore(0, &cols, &mut chosen, &mut basis_stack, &mut |subset: &[usize]| {
        let extra = subset.iter().map(|&i| faces[i].clone());
        let sub = FilteredComplex::new(skeleton.iter().map(|(s, w)| (s.clone(), w)).chain(extra)).expect("faces present");
        let below = betti(&sub, k - 1);
        let top = betti(&sub, k);
        if below == target && top == 0 {
            out.push(AcycleCertificate {
                simplices: subset.iter().map(|&i| faces[i].0.clone()).collect(),
                betti_below: below,
                betti_top: top,
                weight: subset.iter().map(|&i| faces[i].1).sum(),
            });
        }
    });
    if let Some(first) = out.first() {
        if let Some(bad) = out.iter().find(|c| c.simplices.len() != first.simplices.len()) {
            return Err(OracleError::UnequalCardinality(first.simplices.len(), bad.simplices.len()));
        }
    }
    Ok(out)
}

fn explore<F: FnMut(&[usize])>(next: usize, cols: &[Bits], chosen: &mut Vec<usize>, bases: &mut Vec<Basis>, visit: &mut F) {
    if next == cols.len() {
        visit(chosen);
        return;
    }
    // include `next` if it keeps the subset acyclic
    let mut with = Basis {
        rows: bases.last().unwrap().rows,
        pivots: bases.last().unwrap().pivots.clone(),
    };
    if with.insert(cols[next].clone()) {
        chosen.push(next);
        bases.push(with);
        explore(next + 1, cols, chosen, bases, visit);
        bases.pop();
        chosen.pop();
    }
    explore(next + 1, cols, chosen, bases, visit);
}

/// Spanning acycle of least total weight. Ties are broken towards the
/// subset whose filtration positions are lexicographically smallest.
pub fn min_weight_spanning_acycle(complex: &FilteredComplex, k: usize) -> Result<AcycleCertificate, OracleError> {
    let all = enumerate_spanning_acycles(complex, k, MAX_FACES)?;
    let key = |c: &AcycleCertificate| -> Vec<usize> {
        let mut v: Vec<usize> = c.simplices.iter().map(|s| complex.index_of(s).unwrap()).collect();
        v.sort_unstable();
        v
    };
    all.into_iter()
        .min_by(|a, b| a.weight.total_cmp(&b.weight).then_with(|| key(a).cmp(&key(b))))
        .ok_or(OracleError::NoAcycle)
}

/// Euclidean minimum spanning tree of the complete graph on `points`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mst {
    pub edges: Vec<(VertexId, VertexId)>,
    pub total: f64,
}

/// Kruskal's algorithm over all `n(n-1)/2` pairs.
pub fn kruskal_mst(points: &PointSet) -> Mst {
    let pts = points.points();
    let n = pts.len();
    let mut edges: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&pts[i].coords, &pts[j].coords);
            let (dx, dy, dz) = (a[0] - b[0], a[1] - b[1], a[2] - b[2]);
            let d = sqrt(dx * dx + dy * dy + dz * dz);
            edges.push((d, i, j));
        }
    }
    edges.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut dsu = Dsu::new(n);
    let mut out = Mst {
        edges: Vec::with_capacity(n.saturating_sub(1)),
        total: 0.0,
    };
    for (d, i, j) in edges {
        if dsu.union(i, j) {
            out.edges.push((pts[i].id, pts[j].id));
            out.total += d;
            if out.edges.len() + 1 == n {
                break;
            }
        }
    }
    out
}

struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut x = x;
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            core::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}
