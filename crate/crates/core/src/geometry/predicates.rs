//! Sign-exact orientation and in-sphere tests.
//!
//! Thin wrappers over Shewchuk's adaptive-precision predicates. The sign of
//! every result is exact for `f64` input; a zero means a genuine degeneracy.

use robust::{Coord, Coord3D};

use super::Coords;

#[inline]
fn c2(p: &Coords) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

#[inline]
fn c3(p: &Coords) -> Coord3D<f64> {
    Coord3D { x: p[0], y: p[1], z: p[2] }
}

/// Orientation of `d + 1` points. Positive means positively oriented
/// (counterclockwise in the plane; `robust::orient3d > 0` in space).
#[inline]
pub fn orient(dim: usize, p: &[&Coords]) -> f64 {
    match dim {
        2 => robust::orient2d(c2(p[0]), c2(p[1]), c2(p[2])),
        3 => robust::orient3d(c3(p[0]), c3(p[1]), c3(p[2]), c3(p[3])),
        _ => unreachable!("dimension {dim} unsupported"),
    }
}

/// Positive iff `q` lies strictly inside the circumsphere of the positively
/// oriented simplex `p`, zero iff on it.
#[inline]
pub fn insphere(dim: usize, p: &[&Coords], q: &Coords) -> f64 {
    match dim {
        2 => robust::incircle(c2(p[0]), c2(p[1]), c2(p[2]), c2(q)),
        3 => robust::insphere(c3(p[0]), c3(p[1]), c3(p[2]), c3(p[3]), c3(q)),
        _ => unreachable!("dimension {dim} unsupported"),
    }
}

/// Exact collinearity of three points in space (all coordinate-plane
/// projections are degenerate).
pub fn collinear3(a: &Coords, b: &Coords, c: &Coords) -> bool {
    let proj = |i: usize, j: usize| {
        robust::orient2d(
            Coord { x: a[i], y: a[j] },
            Coord { x: b[i], y: b[j] },
            Coord { x: c[i], y: c[j] },
        )
    };
    proj(0, 1) == 0.0 && proj(1, 2) == 0.0 && proj(0, 2) == 0.0
}

/// Exact test for affine dependence of `points` (at most four of them).
pub fn affinely_dependent(points: &[&Coords]) -> bool {
    match points.len() {
        0 | 1 => false,
        2 => points[0] == points[1],
        3 => collinear3(points[0], points[1], points[2]),
        4 => orient(3, points) == 0.0,
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_conventions() {
        let a = [0.0, 0.0, 0.0];
        let b = [1.0, 0.0, 0.0];
        let c = [0.0, 1.0, 0.0];
        assert!(orient(2, &[&a, &b, &c]) > 0.0);
        assert!(orient(2, &[&b, &a, &c]) < 0.0);
        assert!(insphere(2, &[&a, &b, &c], &[0.5, 0.5, 0.0]) > 0.0);
        assert!(insphere(2, &[&a, &b, &c], &[2.0, 2.0, 0.0]) < 0.0);
        assert_eq!(insphere(2, &[&a, &b, &c], &[1.0, 1.0, 0.0]), 0.0);

        let d = [0.0, 0.0, 1.0];
        let o = orient(3, &[&a, &b, &c, &d]);
        let (p, q) = if o > 0.0 { (b, c) } else { (c, b) };
        assert!(insphere(3, &[&a, &p, &q, &d], &[0.2, 0.2, 0.2]) > 0.0);
        assert!(insphere(3, &[&a, &p, &q, &d], &[3.0, 0.2, 0.2]) < 0.0);
    }

    #[test]
    fn dependence() {
        let a = [0.0, 0.0, 0.0];
        let b = [1.0, 1.0, 1.0];
        let c = [2.0, 2.0, 2.0];
        assert!(collinear3(&a, &b, &c));
        assert!(!collinear3(&a, &b, &[2.0, 2.0, 2.5]));
        assert!(affinely_dependent(&[&a, &a]));
        assert!(affinely_dependent(&[&a, &b, &[0.0, 1.0, 1.0], &[1.0, 2.0, 2.0]]));
    }
}
