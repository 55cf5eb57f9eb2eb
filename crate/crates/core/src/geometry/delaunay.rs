//! Incremental (Bowyer–Watson) Delaunay triangulation in the plane and in
//! space.
//!
//! The convex hull is closed off with a single vertex at infinity, so every
//! hull facet has an "infinite" cell on its outer side and point location
//! never falls off the mesh. All sign tests go through the exact predicates
//! in [`super::predicates`]; a vanishing sign is reported as a degeneracy
//! naming the points involved instead of being perturbed away.

use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;
use smallvec::SmallVec;

use super::predicates::{affinely_dependent, collinear3, insphere, orient};
use super::{Coords, DegeneracyKind, GeometryError, PointSet};
use crate::complex::{Simplex, VertexId};

const INF: u32 = u32::MAX;

/// Delaunay triangulation of a point set.
///
/// `cells` are the top-dimensional simplices (vertex ids, sorted).
/// `neighbors[c][i]` is the cell across the facet of `cells[c]` that omits
/// its `i`-th vertex, or `None` on the convex hull. When the input has at
/// most `d` points the single cell is their simplex, of lower dimension.
#[derive(Clone, Debug)]
pub struct Triangulation {
    dim: usize,
    vertices: Vec<VertexId>,
    cells: Vec<Simplex>,
    neighbors: Vec<SmallVec<[Option<u32>; 4]>>,
}

impl Triangulation {
    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Simplex] {
        &self.cells
    }

    pub fn neighbors(&self, cell: usize) -> &[Option<u32>] {
        &self.neighbors[cell]
    }

    /// Number of top-dimensional cells.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Delaunay triangulation of `points` (dimension taken from the set).
///
/// Fails with [`GeometryError::Degenerate`] when an exact sign test hits
/// zero on a subset that matters: duplicate points, `d + 1` affinely
/// dependent points, or `d + 2` points on a common sphere bounding a
/// Delaunay cell.
pub fn delaunay(points: &PointSet) -> Result<Triangulation, GeometryError> {
    let dim = points.dim();
    let ids: Vec<VertexId> = points.ids().collect();
    let coords: Vec<Coords> = points.points().iter().map(|p| p.coords).collect();
    check_duplicates(&coords, &ids)?;

    if coords.len() <= dim {
        return small_case(dim, &coords, &ids);
    }

    let order = morton_order(dim, &coords);
    let mut b = Builder::new(dim, &coords, &ids);
    let seed = b.initial_simplex(&order)?;
    for &p in &order {
        if !seed.contains(&p) {
            b.insert(p)?;
        }
    }
    b.verify_locally_delaunay()?;
    Ok(b.finish())
}

fn check_duplicates(coords: &[Coords], ids: &[VertexId]) -> Result<(), GeometryError> {
    let mut idx: Vec<usize> = (0..coords.len()).collect();
    let key = |i: &usize| coords[*i];
    idx.sort_by(|a, b| {
        let (a, b) = (key(a), key(b));
        a[0].total_cmp(&b[0])
            .then(a[1].total_cmp(&b[1]))
            .then(a[2].total_cmp(&b[2]))
    });
    for w in idx.windows(2) {
        if coords[w[0]] == coords[w[1]] {
            return Err(GeometryError::degenerate(DegeneracyKind::Duplicate, vec![ids[w[0]], ids[w[1]]]));
        }
    }
    Ok(())
}

fn small_case(dim: usize, coords: &[Coords], ids: &[VertexId]) -> Result<Triangulation, GeometryError> {
    if coords.is_empty() {
        return Ok(Triangulation {
            dim,
            vertices: Vec::new(),
            cells: Vec::new(),
            neighbors: Vec::new(),
        });
    }
    let refs: Vec<&Coords> = coords.iter().collect();
    if affinely_dependent(&refs) {
        return Err(GeometryError::degenerate(DegeneracyKind::AffinelyDependent, ids.to_vec()));
    }
    let cell = Simplex::new(ids.iter().copied()).expect("ids are unique");
    let mut vertices = ids.to_vec();
    vertices.sort_unstable();
    Ok(Triangulation {
        dim,
        vertices,
        neighbors: vec![SmallVec::from_elem(None, cell.dim() + 1)],
        cells: vec![cell],
    })
}

// Sort along a Z-order curve so consecutive insertions land close together.
fn morton_order(dim: usize, coords: &[Coords]) -> Vec<u32> {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for c in coords {
        for k in 0..dim {
            lo[k] = lo[k].min(c[k]);
            hi[k] = hi[k].max(c[k]);
        }
    }
    let bits = if dim == 2 { 31 } else { 21 };
    let max = ((1u64 << bits) - 1) as f64;
    let quant = |c: &Coords, k: usize| -> u64 {
        let span = hi[k] - lo[k];
        if span > 0.0 {
            (((c[k] - lo[k]) / span) * max) as u64
        } else {
            0
        }
    };
    let mut keyed: Vec<(u64, u32)> = coords
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut key = 0u64;
            for b in (0..bits).rev() {
                for k in 0..dim {
                    key = (key << 1) | ((quant(c, k) >> b) & 1);
                }
            }
            (key, i as u32)
        })
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, i)| i).collect()
}

struct Builder<'a> {
    dim: usize,
    slots: usize,
    pts: &'a [Coords],
    ids: &'a [VertexId],
    cells: Vec<[u32; 4]>,
    nbrs: Vec<[u32; 4]>,
    alive: Vec<bool>,
    free: Vec<u32>,
    stamp: Vec<u32>,
    conflict: Vec<bool>,
    generation: u32,
    hint: u32,
    ridges: HashMap<[u32; 2], (u32, usize)>,
}

impl<'a> Builder<'a> {
    fn new(dim: usize, pts: &'a [Coords], ids: &'a [VertexId]) -> Self {
        let cap = pts.len() * if dim == 2 { 2 } else { 7 } + 8;
        Builder {
            dim,
            slots: dim + 1,
            pts,
            ids,
            cells: Vec::with_capacity(cap),
            nbrs: Vec::with_capacity(cap),
            alive: Vec::with_capacity(cap),
            free: Vec::new(),
            stamp: Vec::with_capacity(cap),
            conflict: Vec::with_capacity(cap),
            generation: 0,
            hint: 0,
            ridges: HashMap::new(),
        }
    }

    fn degenerate(&self, kind: DegeneracyKind, local: impl IntoIterator<Item = u32>) -> GeometryError {
        let ids = local.into_iter().filter(|&v| v != INF).map(|v| self.ids[v as usize]).collect();
        GeometryError::degenerate(kind, ids)
    }

    fn is_infinite(&self, c: u32) -> Option<usize> {
        self.cells[c as usize][..self.slots].iter().position(|&v| v == INF)
    }

    // Orientation of cell `c` with the vertex in `slot` replaced by `p`.
    fn orient_with(&self, cell: &[u32; 4], slot: usize, p: u32) -> f64 {
        let mut refs: [&Coords; 4] = [&self.pts[0]; 4];
        for s in 0..self.slots {
            let v = if s == slot { p } else { cell[s] };
            refs[s] = &self.pts[v as usize];
        }
        orient(self.dim, &refs[..self.slots])
    }

    fn insphere_of(&self, cell: &[u32; 4], p: u32) -> f64 {
        let mut refs: [&Coords; 4] = [&self.pts[0]; 4];
        for s in 0..self.slots {
            refs[s] = &self.pts[cell[s] as usize];
        }
        insphere(self.dim, &refs[..self.slots], &self.pts[p as usize])
    }

    fn conflicts(&self, c: u32, p: u32) -> Result<bool, GeometryError> {
        let cell = self.cells[c as usize];
        match self.is_infinite(c) {
            Some(j) => {
                let o = self.orient_with(&cell, j, p);
                if o == 0.0 {
                    // p is on the hull facet's hyperplane: it conflicts iff it
                    // lies inside the facet's circumball, which is the
                    // finite neighbour's circumball cut by that hyperplane.
                    let inner = self.nbrs[c as usize][j];
                    let s = self.insphere_of(&self.cells[inner as usize], p);
                    if s == 0.0 {
                        return Err(self.degenerate(DegeneracyKind::AffinelyDependent, cell[..self.slots].iter().copied().chain([p])));
                    }
                    return Ok(s > 0.0);
                }
                Ok(o > 0.0)
            }
            None => {
                let s = self.insphere_of(&cell, p);
                if s == 0.0 {
                    return Err(self.degenerate(DegeneracyKind::Cospherical, cell[..self.slots].iter().copied().chain([p])));
                }
                Ok(s > 0.0)
            }
        }
    }

    fn alloc(&mut self, cell: [u32; 4]) -> u32 {
        if let Some(c) = self.free.pop() {
            let i = c as usize;
            self.cells[i] = cell;
            self.nbrs[i] = [INF; 4];
            self.alive[i] = true;
            c
        } else {
            self.cells.push(cell);
            self.nbrs.push([INF; 4]);
            self.alive.push(true);
            self.stamp.push(0);
            self.conflict.push(false);
            (self.cells.len() - 1) as u32
        }
    }

    fn initial_simplex(&mut self, order: &[u32]) -> Result<Vec<u32>, GeometryError> {
        let p = |i: u32| &self.pts[i as usize];
        let mut seed = vec![order[0]];
        let second = order.iter().copied().find(|&i| p(i) != p(seed[0]));
        seed.extend(second);
        if seed.len() == 2 {
            let third = order.iter().copied().find(|&i| {
                if self.dim == 2 {
                    orient(2, &[p(seed[0]), p(seed[1]), p(i)]) != 0.0
                } else {
                    !collinear3(p(seed[0]), p(seed[1]), p(i))
                }
            });
            seed.extend(third);
        }
        if self.dim == 3 && seed.len() == 3 {
            let fourth = order
                .iter()
                .copied()
                .find(|&i| orient(3, &[p(seed[0]), p(seed[1]), p(seed[2]), p(i)]) != 0.0);
            seed.extend(fourth);
        }
        if seed.len() < self.slots {
            return Err(self.degenerate(DegeneracyKind::AffinelyDependent, order.iter().copied()));
        }

        let mut c0 = [0u32; 4];
        c0[..self.slots].copy_from_slice(&seed);
        if self.orient_with(&c0, 0, c0[0]) < 0.0 {
            c0.swap(0, 1);
        }
        let mut created = vec![self.alloc(c0)];
        for i in 0..self.slots {
            let mut t = c0;
            t[i] = INF;
            let (a, b) = match i {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            t.swap(a, b);
            created.push(self.alloc(t));
        }
        // Link by shared facets.
        let mut facets: HashMap<[u32; 3], (u32, usize)> = HashMap::new();
        for &c in &created {
            for s in 0..self.slots {
                let key = self.facet_key(c, s);
                if let Some((o, os)) = facets.remove(&key) {
                    self.nbrs[c as usize][s] = o;
                    self.nbrs[o as usize][os] = c;
                } else {
                    facets.insert(key, (c, s));
                }
            }
        }
        debug_assert!(facets.is_empty());
        self.hint = created[0];
        Ok(seed)
    }

    fn facet_key(&self, c: u32, skip: usize) -> [u32; 3] {
        let mut key = [0u32; 3];
        let mut n = 0;
        for s in 0..self.slots {
            if s != skip {
                key[n] = self.cells[c as usize][s];
                n += 1;
            }
        }
        key[..n].sort_unstable();
        key
    }

    // Visibility walk from the hint; returns a cell in conflict with `p`.
    fn locate(&self, p: u32) -> Result<u32, GeometryError> {
        let mut c = self.hint;
        if !self.alive[c as usize] {
            c = self.alive.iter().position(|&a| a).unwrap() as u32;
        }
        let cap = self.cells.len() + 64;
        for step in 0..cap {
            if let Some(j) = self.is_infinite(c) {
                if self.conflicts(c, p)? {
                    return Ok(c);
                }
                c = self.nbrs[c as usize][j];
                continue;
            }
            let cell = self.cells[c as usize];
            let mut next = None;
            for k in 0..self.slots {
                let s = (k + step) % self.slots;
                if self.orient_with(&cell, s, p) < 0.0 {
                    next = Some(self.nbrs[c as usize][s]);
                    break;
                }
            }
            match next {
                Some(n) => {
                    if self.is_infinite(n).is_some() {
                        // p lies beyond that hull facet
                        return Ok(n);
                    }
                    c = n;
                }
                None => return Ok(c),
            }
        }
        for c in 0..self.cells.len() as u32 {
            if self.alive[c as usize] && self.conflicts(c, p)? {
                return Ok(c);
            }
        }
        unreachable!("no cell conflicts with an inserted point")
    }

    fn insert(&mut self, p: u32) -> Result<(), GeometryError> {
        let start = self.locate(p)?;
        self.generation += 1;
        let generation = self.generation;
        self.stamp[start as usize] = generation;
        self.conflict[start as usize] = true;
        let mut stack = vec![start];
        let mut cavity = vec![start];
        let mut boundary: Vec<(u32, usize)> = Vec::new();
        while let Some(c) = stack.pop() {
            for s in 0..self.slots {
                let n = self.nbrs[c as usize][s];
                let ni = n as usize;
                if self.stamp[ni] != generation {
                    self.stamp[ni] = generation;
                    self.conflict[ni] = self.conflicts(n, p)?;
                    if self.conflict[ni] {
                        stack.push(n);
                        cavity.push(n);
                        continue;
                    }
                }
                if !self.conflict[ni] {
                    boundary.push((c, s));
                }
            }
        }

        // New cells: conflict cell with the boundary-facet slot replaced by p.
        let mut pending: Vec<([u32; 4], usize, u32, usize)> = Vec::with_capacity(boundary.len());
        for &(c, s) in &boundary {
            let mut cell = self.cells[c as usize];
            cell[s] = p;
            if !cell[..self.slots].contains(&INF) && self.orient_with(&cell, s, p) <= 0.0 {
                return Err(self.degenerate(DegeneracyKind::AffinelyDependent, cell[..self.slots].iter().copied()));
            }
            let outer = self.nbrs[c as usize][s];
            let back = (0..self.slots)
                .find(|&t| self.nbrs[outer as usize][t] == c)
                .expect("adjacency is symmetric");
            pending.push((cell, s, outer, back));
        }
        for &c in &cavity {
            self.alive[c as usize] = false;
            self.free.push(c);
        }
        self.ridges.clear();
        let mut last = start;
        for (cell, s, outer, back) in pending {
            let n = self.alloc(cell);
            self.nbrs[n as usize][s] = outer;
            self.nbrs[outer as usize][back] = n;
            for t in 0..self.slots {
                if t == s {
                    continue;
                }
                let mut key = [0u32; 2];
                let mut m = 0;
                for u in 0..self.slots {
                    if u != s && u != t {
                        key[m] = cell[u];
                        m += 1;
                    }
                }
                key[..m].sort_unstable();
                if let Some((o, os)) = self.ridges.remove(&key) {
                    self.nbrs[n as usize][t] = o;
                    self.nbrs[o as usize][os] = n;
                } else {
                    self.ridges.insert(key, (n, t));
                }
            }
            last = n;
        }
        debug_assert!(self.ridges.is_empty());
        self.hint = last;
        Ok(())
    }

    // Every pair of adjacent finite cells must be strictly locally Delaunay.
    fn verify_locally_delaunay(&self) -> Result<(), GeometryError> {
        for c in 0..self.cells.len() {
            if !self.alive[c] || self.is_infinite(c as u32).is_some() {
                continue;
            }
            for s in 0..self.slots {
                let n = self.nbrs[c][s];
                if n < c as u32 || self.is_infinite(n).is_some() {
                    continue;
                }
                let t = (0..self.slots).find(|&t| self.nbrs[n as usize][t] == c as u32).unwrap();
                let opp = self.cells[n as usize][t];
                let sign = self.insphere_of(&self.cells[c], opp);
                if sign >= 0.0 {
                    let verts = self.cells[c][..self.slots].iter().copied().chain([opp]);
                    return Err(self.degenerate(DegeneracyKind::Cospherical, verts));
                }
            }
        }
        Ok(())
    }

    fn finish(self) -> Triangulation {
        let mut renumber = vec![u32::MAX; self.cells.len()];
        let mut finite = Vec::new();
        for c in 0..self.cells.len() {
            if self.alive[c] && self.is_infinite(c as u32).is_none() {
                renumber[c] = finite.len() as u32;
                finite.push(c);
            }
        }
        let mut cells = Vec::with_capacity(finite.len());
        let mut neighbors = Vec::with_capacity(finite.len());
        for &c in &finite {
            let mut slots: SmallVec<[(VertexId, usize); 4]> = (0..self.slots)
                .map(|s| (self.ids[self.cells[c][s] as usize], s))
                .collect();
            slots.sort_unstable();
            let verts: SmallVec<[VertexId; 4]> = slots.iter().map(|x| x.0).collect();
            cells.push(Simplex::from_sorted(&verts));
            neighbors.push(
                slots
                    .iter()
                    .map(|&(_, s)| {
                        let n = renumber[self.nbrs[c][s] as usize];
                        (n != u32::MAX).then_some(n)
                    })
                    .collect(),
            );
        }
        let mut vertices = self.ids.to_vec();
        vertices.sort_unstable();
        Triangulation {
            dim: self.dim,
            vertices,
            cells,
            neighbors,
        }
    }
}
