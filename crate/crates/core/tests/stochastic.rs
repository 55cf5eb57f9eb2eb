mod common;

use acycle_core::complex::Simplex;
use acycle_core::geometry::{delaunay, delaunay_complex, distance, Point, WeightMode};
use acycle_core::msa::{cost_between, PhiSpec};
use acycle_core::stochastic::{build_config, rng, sample_poisson, Aabb, ConfigSpec, Window};
use rand::Rng;

fn origin_id(d: usize) -> u32 {
    2 * d as u32 + 2
}

#[test]
fn poisson_counts_have_the_right_mean() {
    let region = Aabb::new(2, [0.0; 3], [2.0, 2.0, 0.0]);
    let (mut sum, mut sq) = (0.0, 0.0);
    let n = 10_000;
    for seed in 0..n {
        let c = sample_poisson(0.5, &region, seed, 0).len() as f64;
        sum += c;
        sq += c * c;
    }
    let mean = sum / n as f64;
    let var = sq / n as f64 - mean * mean;
    let se = (2.0f64 / n as f64).sqrt();
    assert!((mean - 2.0).abs() < 3.0 * se, "mean {mean}");
    assert!((var - 2.0).abs() < 0.15, "variance {var}");
}

#[test]
fn window_counts_scale_with_volume() {
    let b = Window::centered(100.0, 2).bounds();
    let mean: f64 = (0..400).map(|r| sample_poisson(1.0, &b, 3, r).len() as f64).sum::<f64>() / 400.0;
    assert!((mean - 100.0).abs() < 3.0 * (100.0f64 / 400.0).sqrt());
}

#[test]
fn cone_regions_keep_a_fixed_share_of_the_ball() {
    let c = build_config(ConfigSpec::new(2, 1.0).unwrap()).unwrap();
    let mut g = rng(5, 0);
    for region in &c.regions[..3] {
        let trials = 200_000;
        let mut hits = 0;
        let mut inside = 0;
        for _ in 0..trials {
            let mut y = region.center;
            y[0] += region.radius * (2.0 * g.random::<f64>() - 1.0);
            y[1] += region.radius * (2.0 * g.random::<f64>() - 1.0);
            if distance(&y, &region.center) <= region.radius {
                inside += 1;
                if region.contains(&y) {
                    hits += 1;
                }
            }
        }
        let share = hits as f64 / inside as f64;
        assert!(share >= (std::f64::consts::PI / 12.0) / (2.0 * std::f64::consts::PI), "share {share}");
        assert!((share - 1.0 / 12.0).abs() < 0.005);
    }
}

#[test]
fn regions_are_disjoint() {
    for d in [2, 3] {
        let spec = ConfigSpec::new(d, 1.0).unwrap();
        let spec = spec.with_eps(spec.max_eps() * 0.999).unwrap();
        let c = build_config(spec).unwrap();
        for i in 0..c.anchors.len() {
            for j in 0..i {
                assert!(distance(&c.anchors[i], &c.anchors[j]) > 2.0 * spec.eps);
            }
        }
    }
}

#[test]
fn unperturbed_configuration_values() {
    for d in [2usize, 3] {
        let c = build_config(ConfigSpec::new(d, 1.0).unwrap().with_eps(0.0).unwrap()).unwrap();
        let pts = c.anchor_points();
        let o = origin_id(d);
        let with_origin = pts.with_point(Point { id: o, coords: [0.0; 3] }).unwrap();
        let before = delaunay_complex(&pts, WeightMode::Alpha).unwrap();
        let after = delaunay_complex(&with_origin, WeightMode::Alpha).unwrap();

        let inner = Simplex::new(0..=d as u32).unwrap();
        assert!((before.weight(&inner).unwrap() - 1.0).abs() < 1e-9);
        assert!(!after.contains(&inner));
        for i in 0..=d as u32 {
            let e = Simplex::edge(i, o).unwrap();
            assert!((after.weight(&e).unwrap() - 0.5).abs() < 1e-9);
            let top = Simplex::new((0..=d as u32).filter(|&j| j != i).chain([o])).unwrap();
            assert!((after.weight(&top).unwrap() - d as f64 / 2.0).abs() < 1e-9, "{top:?}");
        }
        let dm = cost_between(&before, &after, d, PhiSpec::identity()).unwrap().dm;
        let expected = [2.0, 5.0][d - 2];
        assert!((dm - expected).abs() < 1e-9, "d={d}: {dm}");
    }
}

#[test]
fn planar_configuration_triangles() {
    let c = build_config(ConfigSpec::new(2, 1.0).unwrap().with_eps(0.0).unwrap()).unwrap();
    let tri = delaunay(&c.anchor_points()).unwrap();
    let cells = tri.cells();
    assert_eq!(cells.len(), 7);
    assert!(cells.contains(&Simplex::new([0, 1, 2]).unwrap()));
    for i in 0..3u32 {
        let q = 3 + i;
        let face = (0..3u32).filter(|&j| j != i);
        assert!(cells.contains(&Simplex::new(face.chain([q])).unwrap()));
    }
}

#[test]
fn geometric_gap_exceeds_the_closed_form() {
    for d in [2usize, 3] {
        let c = build_config(ConfigSpec::new(d, 1.0).unwrap().with_eps(0.0).unwrap()).unwrap();
        let mut verts = vec![c.anchors[d + 1]];
        verts.extend_from_slice(&c.anchors[1..=d]);
        let ball = acycle_core::geometry::circumsphere(&verts).unwrap();
        let gap = distance(&ball.center, &[0.0; 3]) - ball.radius;
        let df = d as f64;
        let bound = (9.0 * df * df + 1.0) / (10.0 * df * df * df);
        assert!(gap >= bound - 1e-9, "d={d}: {gap} < {bound}");
    }
}
