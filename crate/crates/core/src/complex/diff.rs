use alloc::vec::Vec;

use super::{ComplexError, FilteredComplex, Simplex};

/// One step of an edit sequence between two complexes.
#[derive(Clone, Debug, PartialEq)]
pub enum Edit {
    Delete(Simplex),
    Insert(Simplex, f64),
}

/// Edit sequence turning `from` into `to` through valid complexes: every
/// simplex of `from` missing from `to` is deleted (cofaces before faces),
/// then every simplex of `to` missing from `from` is inserted with its `to`
/// weight (faces before cofaces).
///
/// Simplices present in both are not listed even if their weight differs;
/// see [`apply_edits`].
pub fn symmetric_difference(from: &FilteredComplex, to: &FilteredComplex) -> Vec<Edit> {
    let deletions = from
        .filtration_order()
        .iter()
        .rev()
        .filter(|s| !to.contains(s))
        .map(|s| Edit::Delete(s.clone()));
    let insertions = to
        .iter()
        .filter(|(s, _)| !from.contains(s))
        .map(|(s, w)| Edit::Insert(s.clone(), w));
    deletions.chain(insertions).collect()
}

/// Replays `edits` on `from`, returning every intermediate complex
/// (including `from` itself first).
pub fn apply_edits(from: &FilteredComplex, edits: &[Edit]) -> Result<Vec<FilteredComplex>, ComplexError> {
    let mut out = Vec::with_capacity(edits.len() + 1);
    out.push(from.clone());
    for e in edits {
        let cur = out.last().unwrap();
        let next = match e {
            Edit::Delete(s) => cur.removed(s)?,
            Edit::Insert(s, w) => cur.inserted(s.clone(), *w)?,
        };
        out.push(next);
    }
    Ok(out)
}
