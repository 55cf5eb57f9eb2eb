//! Minimal spanning acycles and the death / birth / lifetime sums built on
//! them.
//!
//! The minimal spanning acycle in degree `k` is the set of negative
//! `k`-simplices of the filtration. With `φ(t) = t^p`:
//!
//! * `M_k = Σ φ(w(σ))` over the acycle (death times of degree `k - 1`),
//! * `B_k = Σ φ(w(σ))` over the remaining `k`-simplices (birth times of
//!   degree `k`),
//! * `L_k = M_k - B_{k-1}`, the total lifetime of degree-`(k - 1)` classes.
//!   Only defined for `φ` the identity and `k ≥ 1`.
//!
//! All sums are exact-then-rounded ([`ExactSum`]), so differences of
//! statistics are correctly rounded as well.

use alloc::vec::Vec;

use thiserror::Error;

use crate::complex::{symmetric_difference, ComplexError, Edit, FilteredComplex, Simplex};
use crate::geometry::{delaunay_complex, GeometryError, Point, PointSet, WeightMode};
use crate::numeric::{powf, ExactSum};
use crate::persistence::{reduce_up_to, Label, PersistencePairing};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum MsaError {
    #[error("lifetime sums are only defined for p = 1 (got p = {0})")]
    WeightedLifetime(f64),
    #[error("lifetime sums start at degree 1")]
    LifetimeDegreeZero,
    #[error("degree {k} exceeds the complex dimension {dim:?}")]
    DegreeOutOfRange { k: usize, dim: Option<usize> },
    #[error("exponent p must be positive and finite (got {0})")]
    InvalidPhi(f64),
    #[error("the two weightings have different simplices")]
    DifferentSupport,
    #[error("death multisets differ in size ({0} vs {1})")]
    CardinalityMismatch(usize, usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The weight map `φ(t) = t^p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiSpec {
    p: f64,
}

impl PhiSpec {
    pub fn new(p: f64) -> Result<Self, MsaError> {
        if p > 0.0 && p.is_finite() {
            Ok(PhiSpec { p })
        } else {
            Err(MsaError::InvalidPhi(p))
        }
    }

    pub fn identity() -> Self {
        PhiSpec { p: 1.0 }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn is_identity(&self) -> bool {
        self.p == 1.0
    }

    #[inline]
    pub fn apply(&self, t: f64) -> f64 {
        if self.p == 1.0 {
            t
        } else if self.p == 2.0 {
            t * t
        } else {
            powf(t, self.p)
        }
    }
}

impl Default for PhiSpec {
    fn default() -> Self {
        PhiSpec::identity()
    }
}

/// Statistics of one degree. `l` is `None` where the lifetime sum is not
/// defined (`k = 0` or `p ≠ 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct MsaResult {
    pub k: usize,
    pub p: f64,
    pub msa: Vec<Simplex>,
    pub m: f64,
    pub b: f64,
    pub l: Option<f64>,
}

impl MsaResult {
    pub fn msa_size(&self) -> usize {
        self.msa.len()
    }
}

// Exact sums behind one `MsaResult`.
#[derive(Clone, Debug, Default)]
pub(crate) struct Sums {
    m: ExactSum,
    b: ExactSum,
    l: Option<ExactSum>,
}

fn check_degree(complex: &FilteredComplex, k: usize) -> Result<(), MsaError> {
    match complex.dim() {
        Some(d) if k <= d => Ok(()),
        None if k == 0 => Ok(()),
        dim => Err(MsaError::DegreeOutOfRange { k, dim }),
    }
}

fn sums(complex: &FilteredComplex, pairing: &PersistencePairing, k: usize, phi: PhiSpec) -> Sums {
    let mut s = Sums::default();
    let mut l = ExactSum::new();
    for (i, &w) in complex.weights().iter().enumerate() {
        let d = complex.simplex(i).dim();
        if d == k {
            match pairing.label(i) {
                Some(Label::Negative) => {
                    s.m.add(phi.apply(w));
                    l.add(w);
                }
                Some(Label::Positive) => s.b.add(phi.apply(w)),
                None => unreachable!("degree {k} was reduced"),
            }
        } else if k >= 1 && d == k - 1 && pairing.label(i) == Some(Label::Positive) {
            l.sub(w);
        }
    }
    if k >= 1 && phi.is_identity() {
        s.l = Some(l);
    }
    s
}

fn result_from(complex: &FilteredComplex, pairing: &PersistencePairing, k: usize, phi: PhiSpec) -> MsaResult {
    let s = sums(complex, pairing, k, phi);
    MsaResult {
        k,
        p: phi.p,
        msa: pairing.negatives(k).map(|i| complex.simplex(i).clone()).collect(),
        m: s.m.value(),
        b: s.b.value(),
        l: s.l.map(|l| l.value()),
    }
}

/// The negative `k`-simplices, in filtration order.
pub fn minimal_spanning_acycle(complex: &FilteredComplex, k: usize) -> Vec<Simplex> {
    if complex.dim().is_none_or(|d| k > d) {
        return Vec::new();
    }
    let pairing = reduce_up_to(complex, k);
    pairing.negatives(k).map(|i| complex.simplex(i).clone()).collect()
}

/// `M_k`, `B_k` and (for `p = 1`, `k ≥ 1`) `L_k`.
pub fn statistics(complex: &FilteredComplex, k: usize, phi: PhiSpec) -> Result<MsaResult, MsaError> {
    check_degree(complex, k)?;
    let pairing = reduce_up_to(complex, k);
    Ok(result_from(complex, &pairing, k, phi))
}

/// Statistics for every degree in `0..=max_k` from a single reduction.
pub fn statistics_all(complex: &FilteredComplex, max_k: usize, phi: PhiSpec) -> Result<Vec<MsaResult>, MsaError> {
    check_degree(complex, max_k)?;
    let pairing = reduce_up_to(complex, max_k);
    Ok((0..=max_k).map(|k| result_from(complex, &pairing, k, phi)).collect())
}

/// `L_k = M_k - B_{k-1}`, refusing weighted variants.
pub fn lifetime(complex: &FilteredComplex, k: usize, phi: PhiSpec) -> Result<f64, MsaError> {
    if !phi.is_identity() {
        return Err(MsaError::WeightedLifetime(phi.p));
    }
    if k == 0 {
        return Err(MsaError::LifetimeDegreeZero);
    }
    Ok(statistics(complex, k, phi)?.l.expect("identity weights in degree ≥ 1"))
}

/// Change of each statistic between two complexes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AddOneCost {
    pub dm: f64,
    pub db: f64,
    pub dl: Option<f64>,
}

fn diff(after: &ExactSum, before: &ExactSum) -> f64 {
    let mut s = after.clone();
    s.sub_sum(before);
    s.value()
}

/// Statistics of `after` minus statistics of `before`, each exact before a
/// single rounding.
pub fn cost_between(before: &FilteredComplex, after: &FilteredComplex, k: usize, phi: PhiSpec) -> Result<AddOneCost, MsaError> {
    check_degree(before, k)?;
    check_degree(after, k)?;
    let sb = sums(before, &reduce_up_to(before, k), k, phi);
    let sa = sums(after, &reduce_up_to(after, k), k, phi);
    Ok(AddOneCost {
        dm: diff(&sa.m, &sb.m),
        db: diff(&sa.b, &sb.b),
        dl: match (&sa.l, &sb.l) {
            (Some(a), Some(b)) => Some(diff(a, b)),
            _ => None,
        },
    })
}

/// [`cost_between`] for every degree in `0..=max_k`, from one reduction of
/// each complex. Degrees above a complex's dimension contribute empty sums.
pub fn costs_up_to(before: &FilteredComplex, after: &FilteredComplex, max_k: usize, phi: PhiSpec) -> Result<Vec<AddOneCost>, MsaError> {
    let (rb, ra) = (reduce_up_to(before, max_k), reduce_up_to(after, max_k));
    Ok((0..=max_k)
        .map(|k| {
            let (sb, sa) = (sums(before, &rb, k, phi), sums(after, &ra, k, phi));
            AddOneCost {
                dm: diff(&sa.m, &sb.m),
                db: diff(&sa.b, &sb.b),
                dl: match (&sa.l, &sb.l) {
                    (Some(a), Some(b)) => Some(diff(a, b)),
                    _ => None,
                },
            }
        })
        .collect())
}

/// Add-one cost of `new_point`: statistics on the Alpha complex of
/// `points ∪ {new_point}` minus those on the Alpha complex of `points`,
/// both built from scratch.
pub fn add_one_cost(points: &PointSet, new_point: Point, k: usize, phi: PhiSpec) -> Result<AddOneCost, MsaError> {
    let before = delaunay_complex(points, WeightMode::Alpha)?;
    let after = delaunay_complex(&points.with_point(new_point)?, WeightMode::Alpha)?;
    cost_between(&before, &after, k, phi)
}

/// One step of a replayed edit chain and the change it causes.
#[derive(Clone, Debug, PartialEq)]
pub enum ReplayStep {
    Delete(Simplex),
    Reweight,
    Insert(Simplex, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Replay {
    pub steps: Vec<(ReplayStep, AddOneCost)>,
    pub total: AddOneCost,
    /// Every single-simplex step changed the acycle by at most one
    /// simplex in each direction.
    pub single_exchange: bool,
}

/// Replays the passage from `before` to `after` one simplex at a time:
/// deletions of `before \ after` (cofaces first), one reweighting of the
/// common part from the `before` weights to the `after` weights, then
/// insertions of `after \ before` (faces first). Each step's change is
/// computed from scratch on the intermediate complexes, and the changes are
/// summed exactly.
pub fn replay_add_one(before: &FilteredComplex, after: &FilteredComplex, k: usize, phi: PhiSpec) -> Result<Replay, MsaError> {
    check_degree(before, k)?;
    check_degree(after, k)?;
    let edits = symmetric_difference(before, after);
    let split = edits.iter().position(|e| matches!(e, Edit::Insert(..))).unwrap_or(edits.len());

    struct State {
        complex: FilteredComplex,
        sums: Sums,
        msa: Vec<Simplex>,
    }
    let eval = |c: FilteredComplex| -> State {
        let pairing = reduce_up_to(&c, k);
        let sums = sums(&c, &pairing, k, phi);
        let msa = if c.dim().is_some_and(|d| d >= k) {
            let mut v: Vec<Simplex> = pairing.negatives(k).map(|i| c.simplex(i).clone()).collect();
            v.sort_unstable();
            v
        } else {
            Vec::new()
        };
        State { complex: c, sums, msa }
    };
    let delta = |a: &State, b: &State| AddOneCost {
        dm: diff(&b.sums.m, &a.sums.m),
        db: diff(&b.sums.b, &a.sums.b),
        dl: match (&b.sums.l, &a.sums.l) {
            (Some(x), Some(y)) => Some(diff(x, y)),
            _ => None,
        },
    };

    let mut total_m = ExactSum::new();
    let mut total_b = ExactSum::new();
    let mut total_l = phi.is_identity().then(ExactSum::new);
    let mut accumulate = |a: &State, b: &State| {
        total_m.merge(&b.sums.m);
        total_m.sub_sum(&a.sums.m);
        total_b.merge(&b.sums.b);
        total_b.sub_sum(&a.sums.b);
        if let (Some(t), Some(x), Some(y)) = (total_l.as_mut(), &b.sums.l, &a.sums.l) {
            t.merge(x);
            t.sub_sum(y);
        }
    };

    let mut steps = Vec::with_capacity(edits.len() + 1);
    let mut single_exchange = true;
    let mut cur = eval(before.clone());
    for (i, e) in edits.iter().enumerate() {
        if i == split {
            let next = eval(reweight_to(&cur.complex, after)?);
            accumulate(&cur, &next);
            steps.push((ReplayStep::Reweight, delta(&cur, &next)));
            cur = next;
        }
        let (next, step) = match e {
            Edit::Delete(s) => (eval(cur.complex.removed(s)?), ReplayStep::Delete(s.clone())),
            Edit::Insert(s, w) => (eval(cur.complex.inserted(s.clone(), *w)?), ReplayStep::Insert(s.clone(), *w)),
        };
        single_exchange &= exchange_at_most_one(&cur.msa, &next.msa);
        accumulate(&cur, &next);
        steps.push((step, delta(&cur, &next)));
        cur = next;
    }
    if split == edits.len() {
        let next = eval(reweight_to(&cur.complex, after)?);
        accumulate(&cur, &next);
        steps.push((ReplayStep::Reweight, delta(&cur, &next)));
        cur = next;
    }
    debug_assert!(cur.complex == *after);
    Ok(Replay {
        steps,
        total: AddOneCost {
            dm: total_m.value(),
            db: total_b.value(),
            dl: total_l.filter(|_| k >= 1).map(|t| t.value()),
        },
        single_exchange,
    })
}

fn reweight_to(common: &FilteredComplex, target: &FilteredComplex) -> Result<FilteredComplex, MsaError> {
    Ok(common.reweighted(|s, _| target.weight(s).expect("common simplex present in target"))?)
}

/// Both slices sorted.
fn exchange_at_most_one(a: &[Simplex], b: &[Simplex]) -> bool {
    let (mut i, mut j, mut only_a, mut only_b) = (0, 0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => (only_a, i) = (only_a + 1, i + 1),
            core::cmp::Ordering::Greater => (only_b, j) = (only_b + 1, j + 1),
            core::cmp::Ordering::Equal => (i, j) = (i + 1, j + 1),
        }
    }
    only_a + a.len() - i <= 1 && only_b + b.len() - j <= 1
}

/// Exponent of the ℓ^p costs in [`stability_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Norm {
    L1,
    L2,
    Sup,
}

impl Norm {
    fn cost<I: Iterator<Item = f64>>(self, diffs: I) -> f64 {
        match self {
            Norm::L1 => diffs.map(f64::abs).collect::<ExactSum>().value(),
            Norm::L2 => diffs.map(|d| d * d).collect::<ExactSum>().value(),
            Norm::Sup => diffs.map(f64::abs).fold(0.0, f64::max),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Compares the degree-`k` acycle weights under two weightings of the same
/// complex: `lhs` is the sorted-matching cost between the two multisets of
/// acycle weights, `rhs` the same cost between the two weightings over all
/// `k`-simplices (sums of `|Δ|^p`, or the maximum for [`Norm::Sup`]).
pub fn stability_check(w: &FilteredComplex, w_prime: &FilteredComplex, k: usize, norm: Norm) -> Result<StabilityCheck, MsaError> {
    if w.len() != w_prime.len() || w.filtration_order().iter().any(|s| !w_prime.contains(s)) {
        return Err(MsaError::DifferentSupport);
    }
    check_degree(w, k)?;
    let deaths = |c: &FilteredComplex| -> Vec<f64> {
        let pairing = reduce_up_to(c, k);
        let mut d: Vec<f64> = pairing.negatives(k).map(|i| c.weight_at(i)).collect();
        d.sort_by(f64::total_cmp);
        d
    };
    let (a, b) = (deaths(w), deaths(w_prime));
    if a.len() != b.len() {
        return Err(MsaError::CardinalityMismatch(a.len(), b.len()));
    }
    let lhs = norm.cost(a.iter().zip(&b).map(|(x, y)| x - y));
    let rhs = norm.cost(
        w.iter()
            .filter(|(s, _)| s.dim() == k)
            .map(|(s, x)| x - w_prime.weight(s).unwrap()),
    );
    Ok(StabilityCheck {
        lhs,
        rhs,
        ok: lhs <= rhs + 1e-9,
    })
}

/// Result of inserting one simplex into a filtered complex.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexInsertion {
    pub label: Label,
    pub added: Vec<Simplex>,
    pub removed: Vec<Simplex>,
    pub ok: bool,
}

/// Inserts `sigma` with weight `w` and compares the acycles in its degree:
/// they may differ by at most one simplex each way, and not at all when
/// `sigma` is positive.
pub fn add_one_simplex_check(complex: &FilteredComplex, sigma: &Simplex, w: f64) -> Result<SimplexInsertion, MsaError> {
    let grown = complex.inserted(sigma.clone(), w)?;
    let k = sigma.dim();
    let before = minimal_spanning_acycle(complex, k);
    let pairing = reduce_up_to(&grown, k);
    let label = pairing.label_of(&grown, sigma)?;
    let after: Vec<Simplex> = pairing.negatives(k).map(|i| grown.simplex(i).clone()).collect();
    let added: Vec<Simplex> = after.iter().filter(|s| !before.contains(s)).cloned().collect();
    let removed: Vec<Simplex> = before.iter().filter(|s| !after.contains(s)).cloned().collect();
    let ok = added.len() <= 1 && removed.len() <= 1 && (label == Label::Negative || (added.is_empty() && removed.is_empty()));
    Ok(SimplexInsertion { label, added, removed, ok })
}
