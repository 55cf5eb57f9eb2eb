//! Planar check comparing the inner triangle with the triangle the origin
//! forms with `p′_1` and `p′_3`.

use acycle_core::complex::Simplex;
use acycle_core::geometry::{delaunay_complex, Point, PointSet, WeightMode};
use acycle_core::stochastic::{build_config, rng, ConfigSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::config::origin_id;
use super::{cell, invalid, points_value, stream, with_retries, ExperimentError, ExperimentReport, Table};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct D2AngleParams {
    pub trials: usize,
    pub r: f64,
    /// Perturbation radius; `r / 50` when absent.
    pub eps: Option<f64>,
    pub seed: u64,
    /// Offending point sets kept in the report.
    pub max_failures: usize,
    pub max_attempts: u32,
}

impl Default for D2AngleParams {
    fn default() -> Self {
        D2AngleParams {
            trials: 1000,
            r: 1.0,
            eps: None,
            seed: 1,
            max_failures: 20,
            max_attempts: 8,
        }
    }
}

impl D2AngleParams {
    pub fn spec(&self) -> Result<ConfigSpec, ExperimentError> {
        let s = ConfigSpec::new(2, self.r)?;
        let eps = self.eps.unwrap_or(self.r / 50.0);
        if !(eps < self.r / 40.0) {
            return Err(invalid(format!("eps must be below r/40 (got {eps})")));
        }
        Ok(s.with_eps(eps)?)
    }
}

/// Outcome of one trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleCheck {
    /// `w([p′_1, p′_2, p′_3])` without the origin.
    pub inner: f64,
    /// `w([p′_1, 0, p′_3])` with the origin.
    pub outer: f64,
    /// `∠(p′_1, 0, p′_3)` in radians.
    pub angle: f64,
}

impl AngleCheck {
    pub fn compute(points: &PointSet) -> Result<Self, ExperimentError> {
        let o = origin_id(2);
        let before = delaunay_complex(points, WeightMode::Alpha)?;
        let after = delaunay_complex(&points.with_point(Point { id: o, coords: [0.0; 3] })?, WeightMode::Alpha)?;
        let inner_s = Simplex::new([0, 1, 2]).unwrap();
        let outer_s = Simplex::new([0, 2, o]).unwrap();
        let inner = before
            .weight(&inner_s)
            .ok_or_else(|| invalid(format!("{inner_s:?} is not a Delaunay triangle")))?;
        let outer = after
            .weight(&outer_s)
            .ok_or_else(|| invalid(format!("{outer_s:?} is not a Delaunay triangle")))?;
        let a = points.coords(0).unwrap();
        let b = points.coords(2).unwrap();
        let cos = (a[0] * b[0] + a[1] * b[1]) / (a[0].hypot(a[1]) * b[0].hypot(b[1]));
        Ok(AngleCheck {
            inner,
            outer,
            angle: cos.clamp(-1.0, 1.0).acos(),
        })
    }

    pub fn weight_ok(&self) -> bool {
        self.inner <= self.outer
    }

    pub fn angle_ok(&self) -> bool {
        self.angle >= 2.0 * std::f64::consts::FRAC_PI_3
    }
}

pub fn run(params: &D2AngleParams) -> Result<ExperimentReport, ExperimentError> {
    if params.trials == 0 {
        return Err(invalid("need at least one trial"));
    }
    let spec = params.spec()?;
    let cfg = build_config(spec)?;
    let trials: Vec<(u64, u32, PointSet, AngleCheck)> = (0..params.trials as u64)
        .into_par_iter()
        .map(|t| {
            with_retries(t, params.max_attempts, |attempt| {
                let pts = cfg.sample(&mut rng(params.seed, stream(t, attempt)));
                let c = AngleCheck::compute(&pts)?;
                Ok((pts, c))
            })
            .map(|((pts, c), a)| (t, a, pts, c))
        })
        .collect::<Result<_, _>>()?;

    let mut report = ExperimentReport::new("d2angle", params);
    let mut records = Table::new(&["seed", "trial", "attempt", "w_inner", "w_outer", "angle", "weight_ok", "angle_ok"]);
    let (mut weight_pass, mut angle_pass) = (0, 0);
    let mut min_angle = f64::INFINITY;
    let mut min_ratio = f64::INFINITY;
    for (t, a, pts, c) in &trials {
        records.push(vec![
            params.seed.to_string(),
            t.to_string(),
            a.to_string(),
            cell(c.inner),
            cell(c.outer),
            cell(c.angle),
            c.weight_ok().to_string(),
            c.angle_ok().to_string(),
        ]);
        weight_pass += c.weight_ok() as usize;
        angle_pass += c.angle_ok() as usize;
        min_angle = min_angle.min(c.angle);
        min_ratio = min_ratio.min(c.outer / c.inner);
        if !(c.weight_ok() && c.angle_ok()) && report.failures.len() < params.max_failures {
            report.failures.push(json!({ "trial": t, "check": c, "points": points_value(pts) }));
        }
    }
    let n = params.trials;
    let third = 2.0 * std::f64::consts::FRAC_PI_3;
    report.lines.push(format!(
        "w([p1,p2,p3]) <= w([p1,0,p3]) on {weight_pass}/{n} trials (min ratio {min_ratio:.6}): {}",
        if weight_pass == n { "ok" } else { "FAIL" }
    ));
    report.lines.push(format!(
        "angle(p1,0,p3) >= 2pi/3 = {third:.6} on {angle_pass}/{n} trials (min {min_angle:.6}): {}",
        if angle_pass == n { "ok" } else { "FAIL" }
    ));
    report.summary = json!({
        "trials": n,
        "eps": spec.eps,
        "weight_pass": weight_pass,
        "angle_pass": angle_pass,
        "min_ratio": min_ratio,
        "min_angle": min_angle,
        "angle_bound": third,
    });
    report.ok = weight_pass == n && angle_pass == n;
    report.records = records;
    Ok(report)
}
