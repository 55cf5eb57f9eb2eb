//! Filtered simplicial complexes over the two-element field.

mod diff;
mod homology;
mod simplex;

use alloc::vec::Vec;
use core::cmp::Ordering;

use hashbrown::HashMap;
use smallvec::SmallVec;
use thiserror::Error;

pub use diff::{apply_edits, symmetric_difference, Edit};
pub use homology::{betti, boundary_rank, BoundaryMatrix};
pub(crate) use homology::xor_sorted;
pub use simplex::{Simplex, VertexId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComplexError {
    #[error("simplex {simplex:?} is missing its face {face:?}")]
    MissingFace { simplex: Simplex, face: Simplex },
    #[error("weight of {simplex:?} ({weight}) is below the weight of its face {face:?} ({face_weight})")]
    NonMonotone {
        simplex: Simplex,
        weight: f64,
        face: Simplex,
        face_weight: f64,
    },
    #[error("simplex {simplex:?} has invalid weight {weight}")]
    InvalidWeight { simplex: Simplex, weight: f64 },
    #[error("simplex {0:?} listed twice")]
    Duplicate(Simplex),
    #[error("simplex {0:?} is not in the complex")]
    NotInComplex(Simplex),
    #[error("simplex {0:?} is already in the complex")]
    AlreadyPresent(Simplex),
    #[error("simplex {simplex:?} still has coface {coface:?}")]
    HasCofaces { simplex: Simplex, coface: Simplex },
}

/// Total order used for filtrations: weight, then dimension, then the
/// lexicographic vertex tuple.
pub fn filtration_cmp(a: (&Simplex, f64), b: (&Simplex, f64)) -> Ordering {
    a.1.total_cmp(&b.1)
        .then_with(|| a.0.dim().cmp(&b.0.dim()))
        .then_with(|| a.0.cmp(b.0))
}

/// A simplicial complex with a monotone weight on every simplex.
///
/// Simplices are stored in filtration order, so "index" below always means
/// position in that order. Immutable once built; editing operations return
/// a new complex.
#[derive(Clone, Debug, Default)]
pub struct FilteredComplex {
    simplices: Vec<Simplex>,
    weights: Vec<f64>,
    index: HashMap<Simplex, usize>,
    max_dim: Option<usize>,
}

impl FilteredComplex {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a complex, checking face closure and weight monotonicity.
    pub fn new<I>(entries: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = (Simplex, f64)>,
    {
        let mut entries: Vec<(Simplex, f64)> = entries.into_iter().collect();
        for (s, w) in &entries {
            if !w.is_finite() || *w < 0.0 {
                return Err(ComplexError::InvalidWeight {
                    simplex: s.clone(),
                    weight: *w,
                });
            }
        }
        entries.sort_by(|a, b| filtration_cmp((&a.0, a.1), (&b.0, b.1)));
        let mut index = HashMap::with_capacity(entries.len());
        for (i, (s, _)) in entries.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(ComplexError::Duplicate(s.clone()));
            }
        }
        for (s, w) in &entries {
            for face in s.facets() {
                match index.get(&face) {
                    None => return Err(ComplexError::MissingFace { simplex: s.clone(), face }),
                    Some(&j) => {
                        let fw = entries[j].1;
                        if fw > *w {
                            return Err(ComplexError::NonMonotone {
                                simplex: s.clone(),
                                weight: *w,
                                face,
                                face_weight: fw,
                            });
                        }
                    }
                }
            }
        }
        let max_dim = entries.iter().map(|(s, _)| s.dim()).max();
        let (simplices, weights) = entries.into_iter().unzip();
        Ok(FilteredComplex {
            simplices,
            weights,
            index,
            max_dim,
        })
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Largest simplex dimension, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.max_dim
    }

    /// Simplices in filtration order: by weight, then dimension, then
    /// lexicographically. Every simplex comes after all of its faces.
    pub fn filtration_order(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn simplex(&self, idx: usize) -> &Simplex {
        &self.simplices[idx]
    }

    pub fn weight_at(&self, idx: usize) -> f64 {
        self.weights[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Simplex, f64)> + '_ {
        self.simplices.iter().zip(self.weights.iter().copied())
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index.contains_key(s)
    }

    pub fn weight(&self, s: &Simplex) -> Option<f64> {
        self.index_of(s).map(|i| self.weights[i])
    }

    /// Number of `k`-simplices.
    pub fn count(&self, k: usize) -> usize {
        self.simplices.iter().filter(|s| s.dim() == k).count()
    }

    /// Filtration indices of the `k`-simplices, ascending.
    pub fn indices_of_dim(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.simplices
            .iter()
            .enumerate()
            .filter(move |(_, s)| s.dim() == k)
            .map(|(i, _)| i)
    }

    /// Filtration indices of the facets of simplex `idx`, ascending.
    pub fn boundary_indices(&self, idx: usize) -> SmallVec<[u32; 4]> {
        let mut out: SmallVec<[u32; 4]> = self.simplices[idx]
            .facets()
            .map(|f| self.index[&f] as u32)
            .collect();
        out.sort_unstable();
        out
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.simplices
            .iter()
            .filter(|s| s.dim() == 0)
            .map(|s| s.vertices()[0])
    }

    /// Sublevel set `{σ : w(σ) ≤ t}`, or `{σ : w(σ) < t}` when `strict`.
    pub fn sublevel(&self, t: f64, strict: bool) -> FilteredComplex {
        let keep = |w: f64| if strict { w < t } else { w <= t };
        self.filtered(|_, w| keep(w))
    }

    /// Simplices of dimension at most `k`.
    pub fn skeleton(&self, k: usize) -> FilteredComplex {
        self.filtered(|s, _| s.dim() <= k)
    }

    // Caller guarantees the predicate selects a face-closed, monotone subset.
    fn filtered<F: Fn(&Simplex, f64) -> bool>(&self, pred: F) -> FilteredComplex {
        let mut simplices = Vec::new();
        let mut weights = Vec::new();
        let mut index = HashMap::new();
        for (s, w) in self.iter() {
            if pred(s, w) {
                index.insert(s.clone(), simplices.len());
                simplices.push(s.clone());
                weights.push(w);
            }
        }
        let max_dim = simplices.iter().map(Simplex::dim).max();
        FilteredComplex {
            simplices,
            weights,
            index,
            max_dim,
        }
    }

    /// Same simplices under a new weight function. Fails if the new weights
    /// are not monotone.
    pub fn reweighted<F: FnMut(&Simplex, f64) -> f64>(&self, mut f: F) -> Result<FilteredComplex, ComplexError> {
        FilteredComplex::new(self.iter().map(|(s, w)| {
            let nw = f(s, w);
            (s.clone(), nw)
        }))
    }

    /// Adds one simplex whose facets are already present.
    pub fn inserted(&self, s: Simplex, w: f64) -> Result<FilteredComplex, ComplexError> {
        if self.contains(&s) {
            return Err(ComplexError::AlreadyPresent(s));
        }
        let entries = self.iter().map(|(t, w)| (t.clone(), w)).chain(core::iter::once((s, w)));
        FilteredComplex::new(entries)
    }

    /// Removes one simplex that has no cofaces.
    pub fn removed(&self, s: &Simplex) -> Result<FilteredComplex, ComplexError> {
        if !self.contains(s) {
            return Err(ComplexError::NotInComplex(s.clone()));
        }
        if let Some(coface) = self.simplices.iter().find(|t| t.dim() == s.dim() + 1 && s.is_face_of(t)) {
            return Err(ComplexError::HasCofaces {
                simplex: s.clone(),
                coface: coface.clone(),
            });
        }
        Ok(self.filtered(|t, _| t != s))
    }
}

impl PartialEq for FilteredComplex {
    fn eq(&self, other: &Self) -> bool {
        self.simplices == other.simplices
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}
