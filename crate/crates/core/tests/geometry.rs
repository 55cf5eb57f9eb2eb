mod common;

use acycle_core::complex::Simplex;
use acycle_core::geometry::{
    alpha_weight, circumsphere, delaunay, delaunay_complex, distance, is_general_position, min_enclosing_ball, Coords, PointSet,
    WeightMode,
};
use common::{planar, points_strategy, uniform_points};
use proptest::prelude::*;

fn coords_of(points: &PointSet, s: &Simplex) -> Vec<Coords> {
    s.vertices().iter().map(|&v| *points.coords(v).unwrap()).collect()
}

/// Empty open circumball for every cell, checked against every point.
fn assert_empty_balls(points: &PointSet) {
    let tri = delaunay(points).unwrap();
    for cell in tri.cells() {
        let ball = circumsphere(&coords_of(points, cell)).unwrap();
        for p in points.points() {
            if cell.contains_vertex(p.id) {
                continue;
            }
            let d = distance(&ball.center, &p.coords);
            assert!(d > ball.radius * (1.0 - 1e-9), "point {} inside the ball of {:?}", p.id, cell);
        }
    }
}

fn shoelace_hull_area(points: &PointSet) -> f64 {
    let mut pts: Vec<(f64, f64)> = points.points().iter().map(|p| (p.coords[0], p.coords[1])).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let n = hull.len();
    (0..n).map(|i| hull[i].0 * hull[(i + 1) % n].1 - hull[(i + 1) % n].0 * hull[i].1).sum::<f64>().abs() / 2.0
}

fn triangle_area(c: &[Coords]) -> f64 {
    ((c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[1][1] - c[0][1]) * (c[2][0] - c[0][0])).abs() / 2.0
}

#[test]
fn empty_balls_on_uniform_samples() {
    for seed in 0..5 {
        assert_empty_balls(&uniform_points(2, 200, seed));
        assert_empty_balls(&uniform_points(3, 200, seed));
    }
}

#[test]
fn regular_simplex_on_the_unit_sphere() {
    let s3 = 3f64.sqrt() / 2.0;
    let tri = [[-s3, -0.5, 0.0], [0.0, 1.0, 0.0], [s3, -0.5, 0.0]];
    let a = (8.0f64 / 9.0).sqrt();
    let b = (2.0f64 / 9.0).sqrt();
    let c = (2.0f64 / 3.0).sqrt();
    let tet = [[0.0, 0.0, 1.0], [a, 0.0, -1.0 / 3.0], [-b, c, -1.0 / 3.0], [-b, -c, -1.0 / 3.0]];
    for (dim, verts) in [(2, &tri[..]), (3, &tet[..])] {
        let ball = circumsphere(verts).unwrap();
        assert!((ball.radius - 1.0).abs() < 1e-12);
        assert!(distance(&ball.center, &[0.0; 3]) < 1e-12);
        let k = delaunay_complex(&PointSet::from_coords(dim, verts.iter().copied()).unwrap(), WeightMode::Alpha).unwrap();
        let top = k.indices_of_dim(dim).next().unwrap();
        assert!((k.weight_at(top) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn obtuse_triangle_edge_weight_matches_side_formula() {
    let pts = planar(&[(0.0, 0.0), (2.0, 0.0), (1.0, 0.3)]);
    let k = delaunay_complex(&pts, WeightMode::Alpha).unwrap();
    let (a, b, c) = (2.0f64, (1.0f64 + 0.09).sqrt(), (1.0f64 + 0.09).sqrt());
    let area = 2.0 * 0.3 / 2.0;
    let r = a * b * c / (4.0 * area);
    let long = Simplex::edge(0, 1).unwrap();
    assert!((k.weight(&long).unwrap() - r).abs() < 1e-12);
    let short = Simplex::edge(0, 2).unwrap();
    assert!((k.weight(&short).unwrap() - b / 2.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn triangulation_tiles_the_hull(points in points_strategy(2, 4, 60)) {
        let gp = is_general_position(&points);
        match delaunay(&points) {
            Err(e) => {
                prop_assert!(e.is_degeneracy());
                prop_assert!(!gp.ok);
            }
            Ok(tri) => {
                let area: f64 = tri.cells().iter().map(|c| triangle_area(&coords_of(&points, c))).sum();
                let hull = shoelace_hull_area(&points);
                prop_assert!((area - hull).abs() <= 1e-9 * hull.max(1.0));
                for (i, _) in tri.cells().iter().enumerate() {
                    for &n in tri.neighbors(i).iter().flatten() {
                        prop_assert!(tri.neighbors(n as usize).contains(&Some(i as u32)));
                    }
                }
            }
        }
    }

    #[test]
    fn complexes_are_contractible(points in points_strategy(3, 5, 40)) {
        if let Ok(k) = delaunay_complex(&points, WeightMode::Alpha) {
            let chi: i64 = (0..=3).map(|d| if d % 2 == 0 { 1 } else { -1 } * k.count(d) as i64).sum();
            prop_assert_eq!(chi, 1);
        }
    }

    #[test]
    fn weights_are_monotone_and_bounded(points in points_strategy(2, 3, 40), cech in any::<bool>()) {
        let mode = if cech { WeightMode::DelaunayCech } else { WeightMode::Alpha };
        let Ok(k) = delaunay_complex(&points, mode) else { return Ok(()) };
        for (s, w) in k.iter() {
            for f in s.facets() {
                prop_assert!(k.weight(&f).unwrap() <= w);
            }
            if s.dim() == 0 {
                prop_assert_eq!(w, 0.0);
                continue;
            }
            let c = coords_of(&points, s);
            let meb = min_enclosing_ball(&c).unwrap().radius;
            let circ = circumsphere(&c).unwrap().radius;
            prop_assert!(meb <= circ * (1.0 + 1e-12));
            if !cech {
                prop_assert!(w >= circ * (1.0 - 1e-9));
            }
        }
    }

    #[test]
    fn gabriel_edges_weigh_half_their_length(points in points_strategy(2, 3, 40)) {
        let Ok(tri) = delaunay(&points) else { return Ok(()) };
        let Ok(k) = delaunay_complex(&points, WeightMode::Alpha) else { return Ok(()) };
        for e in k.filtration_order().iter().filter(|s| s.dim() == 1) {
            let c = coords_of(&points, e);
            let mid = [(c[0][0] + c[1][0]) / 2.0, (c[0][1] + c[1][1]) / 2.0, 0.0];
            let half = distance(&c[0], &c[1]) / 2.0;
            let gabriel = points
                .points()
                .iter()
                .filter(|p| !e.contains_vertex(p.id))
                .all(|p| distance(&p.coords, &mid) > half * (1.0 + 1e-9));
            let w = k.weight(e).unwrap();
            if gabriel {
                prop_assert!((w - half).abs() <= 1e-12 * half.max(1.0));
            } else {
                prop_assert!(w > half);
            }
            prop_assert!((alpha_weight(e, &points, &tri).unwrap() - w).abs() <= 1e-12 * w.max(1.0));
        }
    }

    #[test]
    fn enclosing_ball_matches_support_search(v in prop::collection::vec(prop::array::uniform3(-5.0f64..5.0), 2..9)) {
        let ball = min_enclosing_ball(&v).unwrap();
        for p in &v {
            prop_assert!(distance(p, &ball.center) <= ball.radius * (1.0 + 1e-9) + 1e-12);
        }
        let n = v.len();
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << n) {
            if mask.count_ones() < 2 || mask.count_ones() > 4 {
                continue;
            }
            let sub: Vec<Coords> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| v[i]).collect();
            if let Ok(b) = circumsphere(&sub) {
                if v.iter().all(|p| distance(p, &b.center) <= b.radius * (1.0 + 1e-9) + 1e-12) {
                    best = best.min(b.radius);
                }
            }
        }
        prop_assert!((ball.radius - best).abs() <= 1e-9 * best.max(1.0));
    }
}
