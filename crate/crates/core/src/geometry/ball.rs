use alloc::vec::Vec;

use super::predicates::affinely_dependent;
use super::{dist2, Coords, DegeneracyKind, GeometryError};
use crate::numeric::{solve_linear, sqrt};

/// Closed Euclidean ball.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    pub center: Coords,
    pub radius: f64,
}

impl Ball {
    /// Membership with a small relative slack for rounding.
    pub fn contains(&self, p: &Coords) -> bool {
        let r2 = self.radius * self.radius;
        dist2(&self.center, p) <= r2 * (1.0 + 1e-12) + 1e-300
    }

    /// Strict interior membership (no slack).
    pub fn contains_strictly(&self, p: &Coords) -> bool {
        dist2(&self.center, p) < self.radius * self.radius
    }
}

/// Smallest sphere through `points` with its center in their affine hull.
///
/// For `k + 1` points spanning a `k`-simplex with `k` equal to the ambient
/// dimension this is the usual circumsphere. Affinely dependent input is
/// rejected exactly (not by a tolerance).
pub fn circumsphere(points: &[Coords]) -> Result<Ball, GeometryError> {
    let refs: Vec<&Coords> = points.iter().collect();
    circumsphere_refs(&refs)
}

pub(crate) fn circumsphere_refs(points: &[&Coords]) -> Result<Ball, GeometryError> {
    match points.len() {
        0 => Err(GeometryError::Empty),
        1 => Ok(Ball {
            center: *points[0],
            radius: 0.0,
        }),
        n if n <= 4 => {
            if affinely_dependent(points) {
                return Err(GeometryError::Degenerate {
                    kind: DegeneracyKind::AffinelyDependent,
                    ids: Vec::new(),
                });
            }
            let k = n - 1;
            let a0 = points[0];
            let mut u = [[0.0; 3]; 3];
            for i in 0..k {
                for c in 0..3 {
                    u[i][c] = points[i + 1][c] - a0[c];
                }
            }
            let mut g = [[0.0; 3]; 3];
            let mut rhs = [0.0; 3];
            for i in 0..k {
                for j in 0..k {
                    g[i][j] = dot(&u[i], &u[j]);
                }
                rhs[i] = 0.5 * g[i][i];
            }
            let lambda = solve_linear(&mut g, &mut rhs, k, 0.0).ok_or(GeometryError::Degenerate {
                kind: DegeneracyKind::AffinelyDependent,
                ids: Vec::new(),
            })?;
            let mut offset = [0.0; 3];
            for i in 0..k {
                for c in 0..3 {
                    offset[c] += lambda[i] * u[i][c];
                }
            }
            let center = [a0[0] + offset[0], a0[1] + offset[1], a0[2] + offset[2]];
            Ok(Ball {
                center,
                radius: sqrt(dot(&offset, &offset)),
            })
        }
        _ => Err(GeometryError::Degenerate {
            kind: DegeneracyKind::AffinelyDependent,
            ids: Vec::new(),
        }),
    }
}

fn dot(a: &Coords, b: &Coords) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Smallest ball containing all of `points` (Welzl's recursion).
pub fn min_enclosing_ball(points: &[Coords]) -> Result<Ball, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::Empty);
    }
    let refs: Vec<&Coords> = points.iter().collect();
    let mut support = Vec::with_capacity(4);
    Ok(welzl(&refs, &mut support).expect("non-empty input yields a ball"))
}

fn welzl<'a>(points: &[&'a Coords], support: &mut Vec<&'a Coords>) -> Option<Ball> {
    if points.is_empty() || support.len() == 4 {
        return trivial_ball(support);
    }
    let (p, rest) = points.split_last().unwrap();
    if let Some(ball) = welzl(rest, support) {
        if ball.contains(p) {
            return Some(ball);
        }
    }
    support.push(p);
    let ball = welzl(rest, support);
    support.pop();
    ball
}

fn trivial_ball(support: &[&Coords]) -> Option<Ball> {
    if support.is_empty() {
        return None;
    }
    if let Ok(b) = circumsphere_refs(support) {
        return Some(b);
    }
    // Dependent support: the ball is spanned by a proper subset.
    let mut best: Option<Ball> = None;
    let n = support.len();
    for mask in 1u32..(1 << n) - 1 {
        let sub: Vec<&Coords> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| support[i]).collect();
        if let Ok(b) = circumsphere_refs(&sub) {
            if support.iter().all(|p| b.contains(p)) && best.is_none_or(|c| b.radius < c.radius) {
                best = Some(b);
            }
        }
    }
    best
}
