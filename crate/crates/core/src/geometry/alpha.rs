use alloc::vec::Vec;

use hashbrown::HashMap;
use smallvec::SmallVec;

use super::ball::{circumsphere_refs, min_enclosing_ball, Ball};
use super::delaunay::{delaunay, Triangulation};
use super::{Coords, GeometryError, PointSet};
use crate::complex::{FilteredComplex, Simplex};

/// Which filtration value to put on Delaunay simplices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum WeightMode {
    /// Radius at which the balls restricted to Voronoi cells first meet.
    #[default]
    Alpha,
    /// Radius of the smallest ball enclosing the vertices.
    DelaunayCech,
}

fn coords_of<'a>(points: &'a PointSet, s: &Simplex) -> SmallVec<[&'a Coords; 4]> {
    s.vertices()
        .iter()
        .map(|&v| points.coords(v).expect("simplex vertex missing from point set"))
        .collect()
}

fn ball_of(points: &PointSet, s: &Simplex) -> Result<Ball, GeometryError> {
    circumsphere_refs(&coords_of(points, s)).map_err(|e| match e {
        GeometryError::Degenerate { kind, .. } => GeometryError::degenerate(kind, s.vertices().to_vec()),
        other => other,
    })
}

/// Triangulates `points` and weights every Delaunay simplex.
pub fn delaunay_complex(points: &PointSet, mode: WeightMode) -> Result<FilteredComplex, GeometryError> {
    let tri = delaunay(points)?;
    weighted_complex(points, &tri, mode)
}

/// Weighted Delaunay complex of a triangulation of `points`.
pub fn weighted_complex(points: &PointSet, tri: &Triangulation, mode: WeightMode) -> Result<FilteredComplex, GeometryError> {
    let levels = match mode {
        WeightMode::Alpha => alpha_levels(points, tri)?,
        WeightMode::DelaunayCech => cech_levels(points, tri)?,
    };
    let vertices = tri.vertices().iter().map(|&v| (Simplex::vertex(v), 0.0));
    let rest = levels.into_iter().skip(1).flat_map(|m| m.into_iter());
    Ok(FilteredComplex::new(vertices.chain(rest))?)
}

fn top_dim(tri: &Triangulation) -> Option<usize> {
    tri.cells().first().map(Simplex::dim)
}

// Gabriel / attachment recursion, top dimension first.
fn alpha_levels(points: &PointSet, tri: &Triangulation) -> Result<Vec<HashMap<Simplex, f64>>, GeometryError> {
    let Some(top) = top_dim(tri) else {
        return Ok(Vec::new());
    };
    let mut levels: Vec<HashMap<Simplex, f64>> = (0..=top).map(|_| HashMap::new()).collect();
    for cell in tri.cells() {
        levels[top].insert(cell.clone(), ball_of(points, cell)?.radius);
    }
    for k in (1..top).rev() {
        struct Face {
            ball: Ball,
            min_coface: f64,
            gabriel: bool,
        }
        let mut faces: HashMap<Simplex, Face> = HashMap::with_capacity(levels[k + 1].len() * 2);
        for (sigma, &w) in &levels[k + 1] {
            for (i, tau) in sigma.facets().enumerate() {
                let opposite = points.coords(sigma.vertices()[i]).unwrap();
                let entry = match faces.entry(tau) {
                    hashbrown::hash_map::Entry::Occupied(e) => e.into_mut(),
                    hashbrown::hash_map::Entry::Vacant(e) => {
                        let ball = ball_of(points, e.key())?;
                        e.insert(Face {
                            ball,
                            min_coface: f64::INFINITY,
                            gabriel: true,
                        })
                    }
                };
                entry.min_coface = entry.min_coface.min(w);
                if entry.ball.contains_strictly(opposite) {
                    entry.gabriel = false;
                }
            }
        }
        levels[k] = faces
            .into_iter()
            .map(|(tau, f)| {
                let w = if f.gabriel { f.ball.radius.min(f.min_coface) } else { f.min_coface };
                (tau, w)
            })
            .collect();
    }
    Ok(levels)
}

fn cech_levels(points: &PointSet, tri: &Triangulation) -> Result<Vec<HashMap<Simplex, f64>>, GeometryError> {
    let Some(top) = top_dim(tri) else {
        return Ok(Vec::new());
    };
    let mut levels: Vec<HashMap<Simplex, f64>> = (0..=top).map(|_| HashMap::new()).collect();
    for cell in tri.cells() {
        levels[top].insert(cell.clone(), 0.0);
    }
    for k in (1..top).rev() {
        let faces: Vec<Simplex> = levels[k + 1].keys().flat_map(|s| s.facets().collect::<Vec<_>>()).collect();
        for f in faces {
            levels[k].insert(f, 0.0);
        }
    }
    for k in 1..=top {
        let keys: Vec<Simplex> = levels[k].keys().cloned().collect();
        for s in keys {
            let pts: SmallVec<[Coords; 4]> = coords_of(points, &s).into_iter().copied().collect();
            let mut w = min_enclosing_ball(&pts)?.radius;
            if k > 1 {
                // guard against rounding breaking monotonicity
                for f in s.facets() {
                    w = w.max(levels[k - 1][&f]);
                }
            }
            levels[k].insert(s, w);
        }
    }
    Ok(levels)
}

/// Alpha weight of one simplex of the Delaunay complex, computed directly
/// from the cells around it.
pub fn alpha_weight(simplex: &Simplex, points: &PointSet, tri: &Triangulation) -> Result<f64, GeometryError> {
    let around: Vec<&Simplex> = tri.cells().iter().filter(|c| simplex.is_face_of(c)).collect();
    if around.is_empty() {
        return Err(GeometryError::NotInComplex(simplex.clone()));
    }
    alpha_rec(simplex, points, &around)
}

fn alpha_rec(tau: &Simplex, points: &PointSet, around: &[&Simplex]) -> Result<f64, GeometryError> {
    if tau.dim() == 0 {
        return Ok(0.0);
    }
    let ball = ball_of(points, tau)?;
    if around.iter().all(|c| c.dim() == tau.dim()) {
        return Ok(ball.radius);
    }
    let mut cofaces: Vec<(Simplex, u32)> = Vec::new();
    for c in around {
        for &v in c.vertices() {
            if !tau.contains_vertex(v) {
                let cof = tau.with_vertex(v).unwrap();
                if !cofaces.iter().any(|(s, _)| *s == cof) {
                    cofaces.push((cof, v));
                }
            }
        }
    }
    let mut gabriel = true;
    let mut min_coface = f64::INFINITY;
    for (cof, v) in &cofaces {
        if ball.contains_strictly(points.coords(*v).unwrap()) {
            gabriel = false;
        }
        let sub: Vec<&Simplex> = around.iter().copied().filter(|c| cof.is_face_of(c)).collect();
        min_coface = min_coface.min(alpha_rec(cof, points, &sub)?);
    }
    Ok(if gabriel { ball.radius.min(min_coface) } else { min_coface })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::tests::s;
    use crate::geometry::Point;
    use crate::numeric::sqrt;
    use alloc::vec;

    fn planar(pts: &[(f64, f64)]) -> PointSet {
        PointSet::from_coords(2, pts.iter().map(|&(x, y)| [x, y, 0.0])).unwrap()
    }

    #[test]
    fn equilateral_triangle_weights() {
        let h = sqrt(3.0) / 2.0;
        let k = delaunay_complex(&planar(&[(0.0, 0.0), (1.0, 0.0), (0.5, h)]), WeightMode::Alpha).unwrap();
        assert_eq!(k.len(), 7);
        assert!((k.weight(&s(&[0, 1])).unwrap() - 0.5).abs() < 1e-15);
        assert!((k.weight(&s(&[0, 1, 2])).unwrap() - 1.0 / sqrt(3.0)).abs() < 1e-15);
    }

    #[test]
    fn obtuse_edge_is_attached() {
        let pts = planar(&[(0.0, 0.0), (2.0, 0.0), (1.0, 0.9)]);
        let tri = delaunay(&pts).unwrap();
        let k = weighted_complex(&pts, &tri, WeightMode::Alpha).unwrap();
        let w = k.weight(&s(&[0, 1])).unwrap();
        let tri_r = k.weight(&s(&[0, 1, 2])).unwrap();
        assert_eq!(w, tri_r);
        assert!((w - 1.0055555555555555).abs() < 1e-12);
        assert_eq!(alpha_weight(&s(&[0, 1]), &pts, &tri).unwrap(), w);
        // the other two edges are Gabriel
        let e = k.weight(&s(&[0, 2])).unwrap();
        assert!((e - sqrt(1.81) / 2.0).abs() < 1e-15);
        assert_eq!(alpha_weight(&s(&[2]), &pts, &tri).unwrap(), 0.0);
        assert!(matches!(alpha_weight(&s(&[0, 7]), &pts, &tri), Err(GeometryError::NotInComplex(_))));
    }

    #[test]
    fn delaunay_cech_uses_enclosing_balls() {
        let pts = planar(&[(0.0, 0.0), (4.0, 0.0), (1.0, 0.5)]);
        let k = delaunay_complex(&pts, WeightMode::DelaunayCech).unwrap();
        assert!((k.weight(&s(&[0, 1, 2])).unwrap() - 2.0).abs() < 1e-15);
        assert!((k.weight(&s(&[0, 1])).unwrap() - 2.0).abs() < 1e-15);
        let a = delaunay_complex(&pts, WeightMode::Alpha).unwrap();
        assert!(a.weight(&s(&[0, 1, 2])).unwrap() > 2.0);
    }

    #[test]
    fn space_tetrahedron() {
        let pts = PointSet::new(
            3,
            vec![
                Point::new3(0, 0.0, 0.0, 0.0),
                Point::new3(1, 1.0, 0.0, 0.0),
                Point::new3(2, 0.1, 1.0, 0.0),
                Point::new3(3, 0.2, 0.3, 1.0),
            ],
        )
        .unwrap();
        let tri = delaunay(&pts).unwrap();
        let k = weighted_complex(&pts, &tri, WeightMode::Alpha).unwrap();
        assert_eq!(k.len(), 15);
        for (sx, w) in k.iter() {
            assert_eq!(alpha_weight(sx, &pts, &tri).unwrap(), w);
        }
    }
}
