//! Boundary-matrix reduction over the two-element field.
//!
//! Columns are processed one dimension at a time from the top down so that
//! every column already known to be a pivot row ("cleared") is skipped. The
//! edge columns are reduced with a union–find pass, which produces the same
//! pairing as column reduction (elder rule) in near-linear time.

use alloc::vec;
use alloc::vec::Vec;

use crate::complex::{ComplexError, FilteredComplex, Simplex};

const NONE: u32 = u32::MAX;

/// Sign of a simplex: positive simplices create a cycle, negative ones kill
/// one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    /// `+1` or `-1`.
    pub fn sign(self) -> i8 {
        match self {
            Label::Positive => 1,
            Label::Negative => -1,
        }
    }
}

/// A birth/death pair, both as filtration indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pair {
    pub birth: u32,
    pub death: u32,
}

/// Labels and pairs read off a reduced boundary matrix.
///
/// Indices refer to the filtration order of the complex the pairing was
/// computed from. If the reduction stopped at some dimension `m` below the
/// top, simplices above `m` carry no label and positive `m`-simplices are
/// not reported as essential.
#[derive(Clone, Debug)]
pub struct PersistencePairing {
    labels: Vec<Option<Label>>,
    partner: Vec<u32>,
    dims: Vec<u8>,
    weights: Vec<f64>,
    pairs: Vec<Pair>,
    essential: Vec<u32>,
    top: Option<usize>,
}

/// One persistence interval with the simplices that open and close it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub birth: f64,
    pub death: f64,
    pub birth_index: u32,
    pub death_index: u32,
}

/// Degree-`k` persistence diagram (finite intervals only).
#[derive(Clone, Debug, PartialEq)]
pub struct Diagram {
    pub degree: usize,
    pub intervals: Vec<Interval>,
}

impl Diagram {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Death times in the order of the intervals.
    pub fn deaths(&self) -> impl Iterator<Item = f64> + '_ {
        self.intervals.iter().map(|i| i.death)
    }
}

/// Full reduction of every dimension.
pub fn reduce(complex: &FilteredComplex) -> PersistencePairing {
    reduce_up_to(complex, usize::MAX)
}

/// Reduction of the columns of dimension at most `max_dim`. Labels are
/// exact for those dimensions; this is all that is needed for statistics in
/// degree `max_dim`.
pub fn reduce_up_to(complex: &FilteredComplex, max_dim: usize) -> PersistencePairing {
    let n = complex.len();
    let dims: Vec<u8> = complex.filtration_order().iter().map(|s| s.dim() as u8).collect();
    let mut out = PersistencePairing {
        labels: vec![None; n],
        partner: vec![NONE; n],
        dims,
        weights: complex.weights().to_vec(),
        pairs: Vec::new(),
        essential: Vec::new(),
        top: complex.dim().map(|d| d.min(max_dim)),
    };
    let Some(top) = out.top else {
        return out;
    };

    let mut by_dim: Vec<Vec<u32>> = vec![Vec::new(); top + 1];
    for (i, &d) in out.dims.iter().enumerate() {
        if (d as usize) <= top {
            by_dim[d as usize].push(i as u32);
        }
    }

    let mut pivot_of_row = vec![NONE; n];
    let mut reduced: Vec<Vec<u32>> = vec![Vec::new(); n];
    for k in (2..=top).rev() {
        for &j in &by_dim[k] {
            let ju = j as usize;
            if out.partner[ju] != NONE {
                // cleared: a pivot row of the dimension above
                out.labels[ju] = Some(Label::Positive);
                continue;
            }
            let mut col: Vec<u32> = complex.boundary_indices(ju).to_vec();
            while let Some(&low) = col.last() {
                let p = pivot_of_row[low as usize];
                if p == NONE {
                    break;
                }
                col = crate::complex::xor_sorted(&col, &reduced[p as usize]);
            }
            match col.last() {
                None => out.labels[ju] = Some(Label::Positive),
                Some(&low) => {
                    out.labels[ju] = Some(Label::Negative);
                    pivot_of_row[low as usize] = j;
                    out.partner[low as usize] = j;
                    out.partner[ju] = low;
                    out.pairs.push(Pair { birth: low, death: j });
                    reduced[ju] = col;
                }
            }
        }
    }
    drop(reduced);

    if top >= 1 {
        // Union–find on vertices; each root is the oldest vertex of its
        // component, so a merge kills the younger root.
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                let g = parent[parent[x as usize] as usize];
                parent[x as usize] = g;
                x = g;
            }
            x
        }
        for &j in &by_dim[1] {
            let ju = j as usize;
            let b = complex.boundary_indices(ju);
            let (ra, rb) = (find(&mut parent, b[0]), find(&mut parent, b[1]));
            if ra == rb {
                debug_assert!(out.partner[ju] == NONE || out.dims[out.partner[ju] as usize] == 2);
                out.labels[ju] = Some(Label::Positive);
                continue;
            }
            let (old, young) = if ra < rb { (ra, rb) } else { (rb, ra) };
            parent[young as usize] = old;
            out.labels[ju] = Some(Label::Negative);
            out.partner[young as usize] = j;
            out.partner[ju] = young;
            out.pairs.push(Pair { birth: young, death: j });
        }
    }
    for &v in &by_dim[0] {
        out.labels[v as usize] = Some(Label::Positive);
    }

    let full = complex.dim() == Some(top);
    for i in 0..n {
        let d = out.dims[i] as usize;
        if out.labels[i] == Some(Label::Positive) && out.partner[i] == NONE && (d < top || full) {
            out.essential.push(i as u32);
        }
    }
    out.pairs.sort_by_key(|p| p.death);
    out
}

impl PersistencePairing {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Highest dimension whose simplices are labelled.
    pub fn top_dim(&self) -> Option<usize> {
        self.top
    }

    /// Label of the simplex at filtration index `idx`.
    pub fn label(&self, idx: usize) -> Option<Label> {
        self.labels[idx]
    }

    pub fn label_of(&self, complex: &FilteredComplex, s: &Simplex) -> Result<Label, ComplexError> {
        let idx = complex.index_of(s).ok_or_else(|| ComplexError::NotInComplex(s.clone()))?;
        Ok(self.labels[idx].expect("dimension was not reduced"))
    }

    /// Partner in the pairing, if any.
    pub fn partner(&self, idx: usize) -> Option<u32> {
        let p = self.partner[idx];
        (p != NONE).then_some(p)
    }

    /// All pairs, ordered by death index.
    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    /// Unpaired positive simplices, including the component that never dies.
    pub fn essential(&self) -> &[u32] {
        &self.essential
    }

    /// Essential classes of reduced homology: the oldest vertex is dropped.
    pub fn reduced_essential(&self) -> impl Iterator<Item = u32> + '_ {
        let oldest = self.essential.iter().copied().find(|&i| self.dims[i as usize] == 0);
        self.essential.iter().copied().filter(move |&i| Some(i) != oldest)
    }

    /// Filtration indices of negative `k`-simplices, ascending.
    pub fn negatives(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.with_label(k, Label::Negative)
    }

    /// Filtration indices of positive `k`-simplices, ascending.
    pub fn positives(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.with_label(k, Label::Positive)
    }

    fn with_label(&self, k: usize, label: Label) -> impl Iterator<Item = usize> + '_ {
        (0..self.labels.len()).filter(move |&i| self.dims[i] as usize == k && self.labels[i] == Some(label))
    }

    /// Finite intervals in degree `k`, ordered by death.
    pub fn diagram(&self, k: usize) -> Diagram {
        let intervals = self
            .pairs
            .iter()
            .filter(|p| self.dims[p.birth as usize] as usize == k)
            .map(|p| Interval {
                birth: self.weights[p.birth as usize],
                death: self.weights[p.death as usize],
                birth_index: p.birth,
                death_index: p.death,
            })
            .collect();
        Diagram { degree: k, intervals }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::tests::{equilateral, hollow_triangle, s};
    use crate::numeric::sqrt;

    // Plain column reduction over every dimension, no clearing, no
    // union–find.
    fn plain_labels(k: &FilteredComplex) -> Vec<Label> {
        let n = k.len();
        let mut pivot = vec![NONE; n];
        let mut cols: Vec<Vec<u32>> = (0..n).map(|j| k.boundary_indices(j).to_vec()).collect();
        let mut labels = vec![Label::Positive; n];
        for j in 0..n {
            while let Some(&low) = cols[j].last() {
                let p = pivot[low as usize];
                if p == NONE {
                    pivot[low as usize] = j as u32;
                    labels[j] = Label::Negative;
                    break;
                }
                cols[j] = crate::complex::xor_sorted(&cols[j], &cols[p as usize]);
            }
        }
        labels
    }

    #[test]
    fn single_vertex() {
        let k = FilteredComplex::new([(s(&[0]), 0.0)]).unwrap();
        let p = reduce(&k);
        assert_eq!(p.label(0), Some(Label::Positive));
        assert_eq!(p.essential(), &[0]);
        assert_eq!(p.reduced_essential().count(), 0);
    }

    #[test]
    fn equilateral_triangle_pairing() {
        let k = equilateral();
        let p = reduce(&k);
        let labels: Vec<i8> = (0..k.len()).map(|i| p.label(i).unwrap().sign()).collect();
        assert_eq!(labels, [1, 1, 1, -1, -1, 1, -1]);
        assert_eq!(p.label_of(&k, &s(&[1, 2])).unwrap(), Label::Positive);
        let d1 = p.diagram(1);
        assert_eq!(d1.len(), 1);
        assert_eq!(d1.intervals[0].birth, 0.5);
        assert!((d1.intervals[0].death - 1.0 / sqrt(3.0)).abs() < 1e-15);
        assert_eq!(p.reduced_essential().count(), 0);
    }

    #[test]
    fn hollow_triangle_keeps_a_loop() {
        let k = hollow_triangle();
        let p = reduce(&k);
        assert_eq!(p.label_of(&k, &s(&[1, 2])).unwrap(), Label::Positive);
        let ess: Vec<u32> = p.reduced_essential().collect();
        assert_eq!(ess.len(), 1);
        assert_eq!(k.simplex(ess[0] as usize), &s(&[1, 2]));
    }

    #[test]
    fn two_points_merge_at_half_distance() {
        let k = FilteredComplex::new([(s(&[0]), 0.0), (s(&[1]), 0.0), (s(&[0, 1]), 1.0)]).unwrap();
        let d = reduce(&k).diagram(0);
        assert_eq!(d.intervals.len(), 1);
        assert_eq!((d.intervals[0].birth, d.intervals[0].death), (0.0, 1.0));
        assert!(reduce(&FilteredComplex::empty()).diagram(0).is_empty());
    }

    #[test]
    fn matches_plain_reduction_on_a_tetrahedron_with_extras() {
        let k = FilteredComplex::new([
            (s(&[0]), 0.0),
            (s(&[1]), 0.0),
            (s(&[2]), 0.0),
            (s(&[3]), 0.0),
            (s(&[4]), 0.0),
            (s(&[0, 1]), 1.0),
            (s(&[0, 2]), 1.1),
            (s(&[1, 2]), 1.2),
            (s(&[0, 3]), 1.3),
            (s(&[1, 3]), 1.4),
            (s(&[2, 3]), 1.5),
            (s(&[3, 4]), 1.55),
            (s(&[0, 1, 2]), 1.6),
            (s(&[0, 1, 3]), 1.7),
            (s(&[0, 2, 3]), 1.8),
            (s(&[1, 2, 3]), 1.9),
            (s(&[0, 1, 2, 3]), 2.0),
        ])
        .unwrap();
        let p = reduce(&k);
        let plain = plain_labels(&k);
        for (i, l) in plain.iter().enumerate() {
            assert_eq!(p.label(i), Some(*l), "index {i}");
        }
        let q = reduce_up_to(&k, 1);
        for i in 0..k.len() {
            if k.simplex(i).dim() <= 1 {
                assert_eq!(q.label(i), Some(plain[i]));
            } else {
                assert_eq!(q.label(i), None);
            }
        }
    }
}
