//! Tails of the size and reach of the change caused by adding the origin.

use acycle_core::complex::{symmetric_difference, Edit};
use acycle_core::geometry::{delaunay_complex, distance, Coords, Point, PointSet, WeightMode};
use acycle_core::stochastic::{restrict, sample_poisson, Window};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::stats::{median, non_increasing, survival};
use super::{cell, invalid, stream, with_retries, ExperimentError, ExperimentReport, Table};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailParams {
    pub lambda: f64,
    pub d: usize,
    /// Volumes of the boxes, all centered at the origin.
    pub volumes: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
    /// Grid step for the survival curve of `M_A`.
    pub t_step: f64,
    pub t_max: f64,
    /// `P(M_A > t_check)` must not exceed `p_max`.
    pub t_check: f64,
    pub p_max: f64,
    pub max_attempts: u32,
}

impl Default for TailParams {
    fn default() -> Self {
        TailParams {
            lambda: 1.0,
            d: 2,
            volumes: vec![64.0, 256.0, 1024.0],
            replicates: 2000,
            seed: 1,
            t_step: 0.05,
            t_max: 8.0,
            t_check: 5.0,
            p_max: 0.01,
            max_attempts: 8,
        }
    }
}

impl TailParams {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if !(2..=3).contains(&self.d) || !(self.lambda > 0.0) {
            return Err(invalid("need d in {2, 3} and positive lambda"));
        }
        if self.volumes.is_empty() || self.volumes.iter().any(|&v| !(v > 0.0)) || self.replicates == 0 {
            return Err(invalid("need positive volumes and replicates"));
        }
        if !(self.t_step > 0.0 && self.t_max > 0.0) {
            return Err(invalid("t_step and t_max must be positive"));
        }
        Ok(())
    }

    fn grid(&self) -> Vec<f64> {
        let n = (self.t_max / self.t_step).round() as usize;
        (0..=n).map(|i| i as f64 * self.t_step).collect()
    }
}

/// Unit axes of cones of angular radius π/6 covering every direction.
fn cone_axes(d: usize) -> Vec<Coords> {
    if d == 2 {
        return (0..6)
            .map(|i| {
                let a = i as f64 * std::f64::consts::PI / 3.0;
                [a.cos(), a.sin(), 0.0]
            })
            .collect();
    }
    // Fibonacci sphere; 64 points leave no direction farther than π/6 from
    // an axis.
    let n = 64;
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let s = (1.0 - z * z).sqrt();
            let a = golden * i as f64;
            [s * a.cos(), s * a.sin(), z]
        })
        .collect()
}

/// Largest over the cones of the distance from the origin to the nearest
/// point inside the cone; `None` if some cone holds no point.
pub fn cone_radius(points: &PointSet, axes: &[Coords]) -> Option<f64> {
    let cos = (std::f64::consts::PI / 6.0).cos();
    let mut worst: f64 = 0.0;
    for a in axes {
        let nearest = points
            .points()
            .iter()
            .filter_map(|p| {
                let r = distance(&p.coords, &[0.0; 3]);
                let dot = p.coords[0] * a[0] + p.coords[1] * a[1] + p.coords[2] * a[2];
                (r > 0.0 && dot > cos * r).then_some(r)
            })
            .fold(f64::INFINITY, f64::min);
        if nearest.is_infinite() {
            return None;
        }
        worst = worst.max(nearest);
    }
    Some(worst)
}

#[derive(Clone, Debug)]
struct Sample {
    /// Largest weight in the symmetric difference.
    m: f64,
    /// Size of the symmetric difference.
    l: usize,
    /// Every changed simplex lies in the ball of radius `3R`; `None` if
    /// some cone is empty.
    local: Option<bool>,
}

fn one_box(pts: &PointSet, axes: &[Coords]) -> Result<Sample, ExperimentError> {
    let origin = Point {
        id: pts.next_id(),
        coords: [0.0; 3],
    };
    let grown = pts.with_point(origin)?;
    let before = delaunay_complex(pts, WeightMode::Alpha)?;
    let after = delaunay_complex(&grown, WeightMode::Alpha)?;
    let edits = symmetric_difference(&before, &after);
    let mut m: f64 = 0.0;
    let mut reach: f64 = 0.0;
    for e in &edits {
        let (s, w) = match e {
            Edit::Delete(s) => (s, before.weight(s).unwrap()),
            Edit::Insert(s, w) => (s, *w),
        };
        m = m.max(w);
        for &v in s.vertices() {
            reach = reach.max(distance(grown.coords(v).unwrap(), &[0.0; 3]));
        }
    }
    let local = cone_radius(pts, axes).map(|r| reach <= 3.0 * r);
    Ok(Sample { m, l: edits.len(), local })
}

pub fn run(params: &TailParams) -> Result<ExperimentReport, ExperimentError> {
    params.validate()?;
    let axes = cone_axes(params.d);
    let largest = params.volumes.iter().copied().fold(0.0, f64::max);
    let samples: Vec<(u64, u32, Vec<Sample>)> = (0..params.replicates as u64)
        .into_par_iter()
        .map(|r| {
            with_retries(r, params.max_attempts, |attempt| {
                let all = sample_poisson(params.lambda, &Window::centered(largest, params.d).bounds(), params.seed, stream(r, attempt));
                params
                    .volumes
                    .iter()
                    .map(|&v| one_box(&restrict(&all, &Window::centered(v, params.d).bounds()), &axes))
                    .collect::<Result<Vec<_>, _>>()
            })
            .map(|(s, a)| (r, a, s))
        })
        .collect::<Result<_, _>>()?;

    let mut report = ExperimentReport::new("tails", params);
    let mut records = Table::new(&["seed", "replicate", "attempt", "volume", "M_A", "L_A", "within_3R"]);
    for (r, a, s) in &samples {
        for (v, x) in params.volumes.iter().zip(s) {
            records.push(vec![
                params.seed.to_string(),
                r.to_string(),
                a.to_string(),
                cell(*v),
                cell(x.m),
                x.l.to_string(),
                super::bool_cell(x.local),
            ]);
        }
    }
    let mut long = Table::new(&["series", "volume", "t", "t_scaled", "survival", "log_survival"]);
    let grid = params.grid();
    let d = params.d as f64;
    let mut per_box = Vec::new();
    let mut ok = true;
    for (i, &v) in params.volumes.iter().enumerate() {
        let ms: Vec<f64> = samples.iter().map(|s| s.2[i].m).collect();
        let ls: Vec<f64> = samples.iter().map(|s| s.2[i].l as f64).collect();
        let sm = survival(&ms, &grid);
        let l_max = ls.iter().copied().fold(0.0, f64::max);
        let l_grid: Vec<f64> = (0..=l_max as usize).map(|t| t as f64).collect();
        let sl = survival(&ls, &l_grid);
        for (t, p) in grid.iter().zip(&sm) {
            long.push(vec!["M_A".into(), cell(v), cell(*t), cell(t.powf(d)), cell(*p), cell(p.ln())]);
        }
        for (t, p) in l_grid.iter().zip(&sl) {
            long.push(vec!["L_A".into(), cell(v), cell(*t), cell(t.powf(1.0 / (d + 1.0))), cell(*p), cell(p.ln())]);
        }
        let p_check = survival(&ms, &[params.t_check])[0];
        let monotone = non_increasing(&sm) && non_increasing(&sl);
        let local: Vec<bool> = samples.iter().filter_map(|s| s.2[i].local).collect();
        let local_ok = local.iter().all(|&b| b);
        let pass = monotone && p_check <= params.p_max && local_ok;
        ok &= pass;
        report.lines.push(format!(
            "volume {v}: P(M_A > {}) = {p_check} (≤ {}), survival non-increasing: {monotone}, changes within 3R on {}/{}: {}",
            params.t_check,
            params.p_max,
            local.iter().filter(|&&b| b).count(),
            local.len(),
            if pass { "ok" } else { "FAIL" }
        ));
        per_box.push(json!({
            "volume": v,
            "p_exceed": p_check,
            "non_increasing": monotone,
            "mean_M": super::stats::mean(&ms),
            "max_M": ms.iter().copied().fold(0.0, f64::max),
            "median_L": median(&ls),
            "max_L": l_max,
            "locality_checked": local.len(),
            "locality_ok": local_ok,
            "pass": pass,
        }));
    }
    report.summary = json!({ "boxes": per_box, "t_check": params.t_check, "p_max": params.p_max });
    report.ok = ok;
    report.records = records;
    report.long = long;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cones_cover_every_direction() {
        let cos = (std::f64::consts::PI / 6.0).cos();
        let covered = |axes: &[Coords], u: Coords| axes.iter().any(|a| a[0] * u[0] + a[1] * u[1] + a[2] * u[2] > cos);
        let planar = cone_axes(2);
        for i in 0..3600 {
            let t = (i as f64 + 0.5) * std::f64::consts::TAU / 3600.0;
            assert!(covered(&planar, [t.cos(), t.sin(), 0.0]));
        }
        let spatial = cone_axes(3);
        for i in 0..200 {
            let z = -1.0 + (i as f64 + 0.5) / 100.0;
            let s = (1.0 - z * z).sqrt();
            for j in 0..400 {
                let t = j as f64 * std::f64::consts::TAU / 400.0;
                assert!(covered(&spatial, [s * t.cos(), s * t.sin(), z]));
            }
        }
    }

    #[test]
    fn empty_cone_has_no_radius() {
        let pts = PointSet::from_coords(2, [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]).unwrap();
        assert_eq!(cone_radius(&pts, &cone_axes(2)), None);
    }
}
