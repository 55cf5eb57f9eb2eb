use alloc::vec;
use alloc::vec::Vec;

use super::FilteredComplex;

/// Boundary matrix over the two-element field, one column per simplex in
/// filtration order. Column entries are the filtration indices of the
/// codimension-1 faces, ascending.
#[derive(Clone, Debug)]
pub struct BoundaryMatrix {
    columns: Vec<Vec<u32>>,
    dims: Vec<usize>,
}

impl BoundaryMatrix {
    pub fn new(complex: &FilteredComplex) -> Self {
        let columns = (0..complex.len())
            .map(|i| complex.boundary_indices(i).to_vec())
            .collect();
        let dims = complex.filtration_order().iter().map(|s| s.dim()).collect();
        BoundaryMatrix { columns, dims }
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.columns[j]
    }

    pub fn dim_of(&self, j: usize) -> usize {
        self.dims[j]
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// True iff the boundary of every boundary vanishes.
    pub fn squares_to_zero(&self) -> bool {
        self.columns.iter().all(|col| {
            let mut acc: Vec<u32> = Vec::new();
            for &f in col {
                acc = xor_sorted(&acc, &self.columns[f as usize]);
            }
            acc.is_empty()
        })
    }

    /// Rank of the restriction to the columns of dimension `k`.
    pub fn rank_of_dim(&self, k: usize) -> usize {
        rank(self.columns.iter().zip(&self.dims).filter(|(_, d)| **d == k).map(|(c, _)| c.as_slice()), self.len())
    }
}

pub(crate) fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

// Column echelon rank by pivot elimination on the largest row index.
fn rank<'a, I: Iterator<Item = &'a [u32]>>(columns: I, rows: usize) -> usize {
    let mut pivots: Vec<Option<Vec<u32>>> = vec![None; rows];
    let mut r = 0;
    for col in columns {
        let mut col = col.to_vec();
        while let Some(&low) = col.last() {
            match &pivots[low as usize] {
                Some(p) => col = xor_sorted(&col, p),
                None => {
                    pivots[low as usize] = Some(col);
                    r += 1;
                    break;
                }
            }
        }
    }
    r
}

/// Rank of the boundary map from `k`-chains, with the augmentation
/// `C_0 → F` used for `k = 0` (reduced homology).
pub fn boundary_rank(complex: &FilteredComplex, k: usize) -> usize {
    if k == 0 {
        return usize::from(complex.count(0) > 0);
    }
    let columns: Vec<Vec<u32>> = complex
        .indices_of_dim(k)
        .map(|i| complex.boundary_indices(i).to_vec())
        .collect();
    rank(columns.iter().map(Vec::as_slice), complex.len())
}

/// Reduced `k`-th Betti number over the two-element field.
pub fn betti(complex: &FilteredComplex, k: usize) -> usize {
    let n = complex.count(k);
    n - boundary_rank(complex, k) - boundary_rank(complex, k + 1)
}
