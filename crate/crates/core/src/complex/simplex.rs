use core::fmt;

use smallvec::SmallVec;

/// Vertex identifier. Matches the `id` of the [`crate::geometry::Point`]
/// the vertex came from.
pub type VertexId = u32;

/// An oriented-free simplex: a strictly increasing tuple of vertex ids.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(SmallVec<[VertexId; 4]>);

impl Simplex {
    /// Builds a simplex from arbitrary vertex ids, sorting them.
    ///
    /// Returns `None` for an empty list or repeated ids.
    pub fn new<I: IntoIterator<Item = VertexId>>(vertices: I) -> Option<Self> {
        let mut v: SmallVec<[VertexId; 4]> = vertices.into_iter().collect();
        if v.is_empty() {
            return None;
        }
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some(Simplex(v))
    }

    /// Caller guarantees `vertices` is strictly increasing and non-empty.
    pub(crate) fn from_sorted(vertices: &[VertexId]) -> Self {
        debug_assert!(!vertices.is_empty());
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex(SmallVec::from_slice(vertices))
    }

    pub fn vertex(v: VertexId) -> Self {
        Simplex(smallvec::smallvec![v])
    }

    pub fn edge(a: VertexId, b: VertexId) -> Option<Self> {
        Self::new([a, b])
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.contains_vertex(*v))
    }

    /// Codimension-1 faces, the `i`-th one omitting vertex `i`. Empty for
    /// vertices.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |skip| {
            Simplex(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, v)| *v)
                    .collect(),
            )
        })
    }

    /// The simplex spanned by these vertices plus `v`.
    pub fn with_vertex(&self, v: VertexId) -> Option<Simplex> {
        Simplex::new(self.0.iter().copied().chain(core::iter::once(v)))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
