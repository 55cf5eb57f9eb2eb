use alloc::vec::Vec;

use super::predicates::{affinely_dependent, insphere, orient};
use super::{Coords, DegeneracyKind, PointSet};
use crate::complex::VertexId;

/// Outcome of [`is_general_position`]; `witness` names an offending subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralPosition {
    pub ok: bool,
    pub witness: Option<(DegeneracyKind, Vec<VertexId>)>,
}

/// Exhaustive check that no `d + 1` points are affinely dependent and no
/// `d + 2` points are cospherical. Runs in `O(n^(d+2))`; meant for small
/// inputs and tests.
pub fn is_general_position(points: &PointSet) -> GeneralPosition {
    let d = points.dim();
    let pts = points.points();
    let n = pts.len();
    let c = |i: usize| &pts[i].coords;
    let fail = |kind, idx: &[usize]| GeneralPosition {
        ok: false,
        witness: Some((kind, idx.iter().map(|&i| pts[i].id).collect())),
    };

    for i in 0..n {
        for j in i + 1..n {
            if c(i) == c(j) {
                return fail(DegeneracyKind::Duplicate, &[i, j]);
            }
        }
    }
    let mut subset = Vec::with_capacity(d + 2);
    let mut found = None;
    for_each_subset(n, d + 1, &mut subset, &mut |s| {
        let refs: Vec<&Coords> = s.iter().map(|&i| c(i)).collect();
        if affinely_dependent(&refs) {
            found = Some(s.to_vec());
            return true;
        }
        false
    });
    if let Some(s) = found {
        return fail(DegeneracyKind::AffinelyDependent, &s);
    }
    for_each_subset(n, d + 2, &mut subset, &mut |s| {
        let mut refs: Vec<&Coords> = s[..d + 1].iter().map(|&i| c(i)).collect();
        if orient(d, &refs) < 0.0 {
            refs.swap(0, 1);
        }
        if insphere(d, &refs, c(s[d + 1])) == 0.0 {
            found = Some(s.to_vec());
            return true;
        }
        false
    });
    match found {
        Some(s) => fail(DegeneracyKind::Cospherical, &s),
        None => GeneralPosition { ok: true, witness: None },
    }
}

// Calls `f` on every `k`-subset of `0..n` in lexicographic order until it
// returns true.
fn for_each_subset<F: FnMut(&[usize]) -> bool>(n: usize, k: usize, buf: &mut Vec<usize>, f: &mut F) -> bool {
    if buf.len() == k {
        return f(buf);
    }
    let start = buf.last().map_or(0, |&l| l + 1);
    for i in start..n {
        if n - i < k - buf.len() {
            break;
        }
        buf.push(i);
        let stop = for_each_subset(n, k, buf, f);
        buf.pop();
        if stop {
            return true;
        }
    }
    false
}
