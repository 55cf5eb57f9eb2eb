//! Distance from the origin to the circumsphere of `{q_1, p_2, ..., p_{d+1}}`
//! and the weight of the simplex the origin adds.

use acycle_core::complex::Simplex;
use acycle_core::geometry::{circumsphere, delaunay_complex, distance, Point, WeightMode};
use acycle_core::stochastic::{build_config, ConfigSpec};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{invalid, ExperimentError, ExperimentReport};
use crate::experiments::config::origin_id;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeomParams {
    pub d: usize,
    pub r: f64,
    /// Outer radius; `21 d r` when absent.
    pub rho: Option<f64>,
    pub tol: f64,
}

impl Default for GeomParams {
    fn default() -> Self {
        GeomParams {
            d: 2,
            r: 1.0,
            rho: None,
            tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeomCheck {
    pub d: usize,
    pub rho: f64,
    /// `‖a‖ - ρ′` for the circumcenter `a` and radius `ρ′`.
    pub gap: f64,
    /// `(9d² + 1) / (10 d³)`.
    pub bound: f64,
    /// `1 / (10 d)`.
    pub coarse: f64,
    /// Weight of `[0, p_2, ..., p_{d+1}]` after adding the origin.
    pub added_weight: f64,
    /// `d r / 2`.
    pub added_expected: f64,
}

impl GeomCheck {
    pub fn compute(d: usize, r: f64, rho: Option<f64>) -> Result<Self, ExperimentError> {
        let mut spec = ConfigSpec::new(d, r)?.with_eps(0.0)?;
        if let Some(rho) = rho {
            spec = spec.with_rho(rho)?;
        }
        let cfg = build_config(spec)?;
        let mut verts = vec![cfg.anchors[d + 1]];
        verts.extend_from_slice(&cfg.anchors[1..=d]);
        let ball = circumsphere(&verts)?;
        let df = d as f64;
        let pts = cfg.anchor_points().with_point(Point {
            id: origin_id(d),
            coords: [0.0; 3],
        })?;
        let complex = delaunay_complex(&pts, WeightMode::Alpha)?;
        let added = Simplex::new((1..=d as u32).chain([origin_id(d)])).unwrap();
        let added_weight = complex
            .weight(&added)
            .ok_or_else(|| invalid(format!("{added:?} is not in the complex")))?;
        Ok(GeomCheck {
            d,
            rho: spec.rho,
            gap: (distance(&ball.center, &[0.0; 3]) - ball.radius) / r,
            bound: (9.0 * df * df + 1.0) / (10.0 * df * df * df),
            coarse: 1.0 / (10.0 * df),
            added_weight,
            added_expected: df * r / 2.0,
        })
    }

    pub fn ok(&self, tol: f64) -> bool {
        self.bound >= self.coarse && self.gap >= self.bound - tol && (self.added_weight - self.added_expected).abs() <= tol
    }
}

pub fn run(params: &GeomParams) -> Result<ExperimentReport, ExperimentError> {
    let c = GeomCheck::compute(params.d, params.r, params.rho)?;
    let ok = c.ok(params.tol);
    let mut report = ExperimentReport::new("geom", params);
    report.lines.push(format!(
        "d={}: bound (9d²+1)/(10d³) = {} ≥ 1/(10d) = {}, {}",
        c.d,
        c.bound,
        c.coarse,
        if c.bound >= c.coarse { "ok" } else { "FAIL" }
    ));
    report.lines.push(format!(
        "distance from the origin to the circumsphere at rho = {}: {:.6} ≥ {}, {}",
        c.rho,
        c.gap,
        c.bound,
        if c.gap >= c.bound - params.tol { "ok" } else { "FAIL" }
    ));
    report.lines.push(format!(
        "added simplex weight {} vs dr/2 = {}, {}",
        c.added_weight,
        c.added_expected,
        if (c.added_weight - c.added_expected).abs() <= params.tol { "ok" } else { "FAIL" }
    ));
    report.summary = json!(c);
    report.ok = ok;
    Ok(report)
}
