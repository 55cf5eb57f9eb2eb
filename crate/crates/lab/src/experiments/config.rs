//! Add-one costs of the origin on perturbed inner/outer configurations.

use acycle_core::complex::Simplex;
use acycle_core::geometry::{delaunay_complex, Point, PointSet, WeightMode};
use acycle_core::msa::{cost_between, costs_up_to, PhiSpec};
use acycle_core::stochastic::{build_config, rng, ConfigSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{cell, invalid, opt_cell, points_value, stream, with_retries, ExperimentError, ExperimentReport, Table};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigCheckParams {
    pub d: usize,
    pub r: f64,
    pub ps: Vec<f64>,
    pub trials: usize,
    /// Perturbation radius; `r / 50` when absent.
    pub eps: Option<f64>,
    /// Outer radius; `21 d r` when absent.
    pub rho: Option<f64>,
    pub seed: u64,
    pub max_attempts: u32,
}

impl Default for ConfigCheckParams {
    fn default() -> Self {
        ConfigCheckParams {
            d: 2,
            r: 1.0,
            ps: vec![1.0, 2.0],
            trials: 100,
            eps: None,
            rho: None,
            seed: 1,
            max_attempts: 8,
        }
    }
}

impl ConfigCheckParams {
    pub fn spec(&self) -> Result<ConfigSpec, ExperimentError> {
        let mut s = ConfigSpec::new(self.d, self.r)?;
        if let Some(rho) = self.rho {
            s = s.with_rho(rho)?;
        }
        if let Some(eps) = self.eps {
            s = s.with_eps(eps)?;
        }
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.spec()?;
        if self.ps.is_empty() || self.trials == 0 {
            return Err(invalid("need at least one exponent and one trial"));
        }
        for &p in &self.ps {
            PhiSpec::new(p).map_err(|e| invalid(e.to_string()))?;
        }
        Ok(())
    }
}

/// The origin's id in a configuration of `2d + 2` points.
pub fn origin_id(d: usize) -> u32 {
    2 * d as u32 + 2
}

/// Outcome of the bounds in one degree for one exponent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub k: usize,
    pub p: f64,
    pub dm: f64,
    pub db: f64,
    pub dl: Option<f64>,
    pub m_lower: bool,
    /// `None` in the top degree, where no bound is claimed.
    pub b_lower: Option<bool>,
    pub l_lower: Option<bool>,
    pub upper: bool,
}

impl BoundCheck {
    pub fn ok(&self) -> bool {
        self.m_lower && self.b_lower != Some(false) && self.l_lower != Some(false) && self.upper
    }
}

/// Checks the lower bound `φ(r/4)` and the upper bound `2^{d+1} φ(dr)` on
/// the add-one costs of the origin for `points`.
pub fn check_bounds(points: &PointSet, spec: &ConfigSpec, ps: &[f64]) -> Result<Vec<BoundCheck>, ExperimentError> {
    let d = spec.d;
    let before = delaunay_complex(points, WeightMode::Alpha)?;
    let grown = points.with_point(Point {
        id: origin_id(d),
        coords: [0.0; 3],
    })?;
    let after = delaunay_complex(&grown, WeightMode::Alpha)?;
    let mut out = Vec::new();
    for &p in ps {
        let phi = PhiSpec::new(p).map_err(|e| invalid(e.to_string()))?;
        let lower = phi.apply(spec.r / 4.0);
        let upper = (1u32 << (d + 1)) as f64 * phi.apply(d as f64 * spec.r);
        let costs = costs_up_to(&before, &after, d, phi)?;
        for (k, c) in costs.iter().enumerate().skip(1) {
            let below_top = k < d;
            out.push(BoundCheck {
                k,
                p,
                dm: c.dm,
                db: c.db,
                dl: c.dl,
                m_lower: c.dm > lower,
                b_lower: below_top.then_some(c.db > lower),
                l_lower: c.dl.filter(|_| below_top).map(|l| l > lower),
                upper: c.dm <= upper && c.db <= upper && c.dl.is_none_or(|l| l <= upper),
            });
        }
    }
    Ok(out)
}

/// Weights of the unperturbed configuration with `r = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactValues {
    pub d: usize,
    /// Weight of `[p_1, ..., p_{d+1}]`, removed by the origin.
    pub removed: f64,
    pub removed_absent_after: bool,
    /// Weights of `[0, p_i]`.
    pub edges: Vec<f64>,
    /// Weights of `[0, p_j : j ≠ i]`.
    pub tops: Vec<f64>,
    /// Top-degree add-one cost of `M` for `φ = id`.
    pub dm_top: f64,
}

impl ExactValues {
    pub fn compute(d: usize) -> Result<Self, ExperimentError> {
        let cfg = build_config(ConfigSpec::new(d, 1.0)?.with_eps(0.0)?)?;
        let pts = cfg.anchor_points();
        let o = origin_id(d);
        let before = delaunay_complex(&pts, WeightMode::Alpha)?;
        let after = delaunay_complex(&pts.with_point(Point { id: o, coords: [0.0; 3] })?, WeightMode::Alpha)?;
        let inner = Simplex::new(0..=d as u32).unwrap();
        let weight = |s: Simplex| after.weight(&s).ok_or_else(|| invalid(format!("{s:?} missing after adding the origin")));
        let mut edges = Vec::new();
        let mut tops = Vec::new();
        for i in 0..=d as u32 {
            edges.push(weight(Simplex::edge(i, o).unwrap())?);
            tops.push(weight(Simplex::new((0..=d as u32).filter(|&j| j != i).chain([o])).unwrap())?);
        }
        Ok(ExactValues {
            d,
            removed: before.weight(&inner).ok_or_else(|| invalid("inner simplex missing"))?,
            removed_absent_after: !after.contains(&inner),
            edges,
            tops,
            dm_top: cost_between(&before, &after, d, PhiSpec::identity())?.dm,
        })
    }

    /// All values within `tol` of `1`, `1/2`, `d/2` and `(d+1)d/2 - 1`.
    pub fn ok(&self, tol: f64) -> bool {
        let d = self.d as f64;
        (self.removed - 1.0).abs() <= tol
            && self.removed_absent_after
            && self.edges.iter().all(|w| (w - 0.5).abs() <= tol)
            && self.tops.iter().all(|w| (w - d / 2.0).abs() <= tol)
            && (self.dm_top - ((d + 1.0) * d / 2.0 - 1.0)).abs() <= tol
    }
}

pub fn run(params: &ConfigCheckParams) -> Result<ExperimentReport, ExperimentError> {
    params.validate()?;
    let spec = params.spec()?;
    let cfg = build_config(spec)?;
    let trials: Vec<(u64, u32, PointSet, Vec<BoundCheck>)> = (0..params.trials as u64)
        .into_par_iter()
        .map(|t| {
            with_retries(t, params.max_attempts, |attempt| {
                let pts = cfg.sample(&mut rng(params.seed, stream(t, attempt)));
                let checks = check_bounds(&pts, &spec, &params.ps)?;
                Ok((pts, checks))
            })
            .map(|((pts, checks), a)| (t, a, pts, checks))
        })
        .collect::<Result<_, _>>()?;

    let mut report = ExperimentReport::new("config", params);
    let mut records = Table::new(&[
        "seed", "trial", "attempt", "k", "p", "D0M", "D0B", "D0L", "m_lower", "b_lower", "l_lower", "upper",
    ]);
    let mut passed = 0;
    for (t, a, pts, checks) in &trials {
        for c in checks {
            records.push(vec![
                params.seed.to_string(),
                t.to_string(),
                a.to_string(),
                c.k.to_string(),
                cell(c.p),
                cell(c.dm),
                cell(c.db),
                opt_cell(c.dl),
                c.m_lower.to_string(),
                super::bool_cell(c.b_lower),
                super::bool_cell(c.l_lower),
                c.upper.to_string(),
            ]);
        }
        if checks.iter().all(BoundCheck::ok) {
            passed += 1;
        } else {
            report.failures.push(json!({
                "trial": t,
                "points": points_value(pts),
                "checks": checks.iter().filter(|c| !c.ok()).collect::<Vec<_>>(),
            }));
        }
    }
    let min = |f: &dyn Fn(&BoundCheck) -> Option<f64>| {
        trials.iter().flat_map(|t| t.3.iter()).filter_map(f).fold(f64::INFINITY, f64::min)
    };
    let exact = ExactValues::compute(params.d)?;
    let exact_ok = exact.ok(1e-9);
    report.lines.push(format!(
        "d={}: {passed}/{} trials satisfy every lower and upper bound",
        params.d, params.trials
    ));
    let mut per_k = Vec::new();
    for (i, first) in trials[0].3.iter().enumerate() {
        let checks: Vec<&BoundCheck> = trials.iter().map(|t| &t.3[i]).collect();
        let count = |f: &dyn Fn(&BoundCheck) -> Option<bool>| {
            let v: Vec<bool> = checks.iter().filter_map(|c| f(c)).collect();
            (!v.is_empty()).then(|| v.iter().filter(|&&b| b).count())
        };
        let m = count(&|c| Some(c.m_lower));
        let b = count(&|c| c.b_lower);
        let l = count(&|c| c.l_lower);
        let u = count(&|c| Some(c.upper));
        let show = |x: Option<usize>| x.map_or("n/a".to_string(), |x| format!("{x}/{}", params.trials));
        let min_dm = checks.iter().map(|c| c.dm).fold(f64::INFINITY, f64::min);
        report.lines.push(format!(
            "  k={} p={}: M lower {}, B lower {}, L lower {}, upper {}, min D0M {min_dm:.6}",
            first.k,
            first.p,
            show(m),
            show(b),
            show(l),
            show(u)
        ));
        per_k.push(json!({ "k": first.k, "p": first.p, "m_lower": m, "b_lower": b, "l_lower": l, "upper": u, "min_D0M": min_dm }));
    }
    report.lines.push(format!(
        "unperturbed anchors: removed weight {}, edges {:?}, top simplices {:?}, top-degree cost {}: {}",
        exact.removed,
        exact.edges,
        exact.tops,
        exact.dm_top,
        if exact_ok { "ok" } else { "FAIL" }
    ));
    report.summary = json!({
        "trials": params.trials,
        "passed": passed,
        "eps": spec.eps,
        "rho": spec.rho,
        "min_D0M": min(&|c| Some(c.dm)),
        "min_D0B_below_top": min(&|c| c.b_lower.map(|_| c.db)),
        "min_D0L_below_top": min(&|c| c.l_lower.and(c.dl)),
        "exact": exact,
        "exact_ok": exact_ok,
        "per_k": per_k,
    });
    report.ok = passed == params.trials && exact_ok;
    report.records = records;
    Ok(report)
}
