//! Add-one cost trajectories along nested centered windows.

use acycle_core::complex::FilteredComplex;
use acycle_core::geometry::{delaunay_complex, Point, PointSet, WeightMode};
use acycle_core::msa::{costs_up_to, replay_add_one, AddOneCost, PhiSpec};
use acycle_core::oracle::kruskal_mst;
use acycle_core::persistence::{reduce, Label, PersistencePairing};
use acycle_core::stochastic::{restrict, sample_poisson, Window};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{bool_cell, cell, invalid, opt_cell, stream, with_retries, ExperimentError, ExperimentReport, Table};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilizationParams {
    pub lambda: f64,
    pub d: usize,
    pub ks: Vec<usize>,
    pub p: f64,
    /// Window volumes, increasing.
    pub n_grid: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
    /// Two trajectory values closer than this count as equal.
    pub tol: f64,
    /// Required share of stabilized trajectories per statistic.
    pub min_fraction: f64,
    /// Replay the largest window's edit chain one simplex at a time.
    pub replay: bool,
    /// Largest window on which the spanning tree oracle runs.
    pub mst_max_n: f64,
    pub max_attempts: u32,
}

impl Default for StabilizationParams {
    fn default() -> Self {
        StabilizationParams {
            lambda: 1.0,
            d: 2,
            ks: vec![1, 2],
            p: 1.0,
            n_grid: (6..=12).map(|e| (1u64 << e) as f64).collect(),
            replicates: 100,
            seed: 1,
            tol: 1e-9,
            min_fraction: 0.95,
            replay: true,
            mst_max_n: 1024.0,
            max_attempts: 8,
        }
    }
}

impl StabilizationParams {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(invalid("lambda must be positive"));
        }
        if !(2..=3).contains(&self.d) {
            return Err(invalid("d must be 2 or 3"));
        }
        if self.ks.is_empty() || self.ks.iter().any(|&k| k == 0 || k > self.d) {
            return Err(invalid("every k must lie in 1..=d"));
        }
        PhiSpec::new(self.p).map_err(|e| invalid(e.to_string()))?;
        if self.n_grid.is_empty() || self.n_grid[0] <= 0.0 || self.n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("n_grid must be positive and strictly increasing"));
        }
        if self.replicates == 0 || self.max_attempts == 0 {
            return Err(invalid("replicates and max_attempts must be positive"));
        }
        Ok(())
    }

    fn max_k(&self) -> usize {
        *self.ks.iter().max().unwrap()
    }
}

/// Statistics tracked per degree.
pub const STATS: [&str; 3] = ["M", "B", "L"];

fn stat(c: &AddOneCost, s: usize) -> Option<f64> {
    match s {
        0 => Some(c.dm),
        1 => Some(c.db),
        _ => c.dl,
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub replicate: u64,
    pub attempt: u32,
    pub points: usize,
    /// `costs[i][k]`: costs at grid point `i` in degree `k`.
    pub costs: Vec<Vec<AddOneCost>>,
    pub mst_checked: usize,
    pub mst_failures: usize,
    pub monotone_checked: usize,
    pub monotone_violations: usize,
    pub replay_exact: Option<bool>,
    pub single_exchange: Option<bool>,
}

/// Positive simplices of `small` that are not positive in `big`.
pub(crate) fn monotonicity_violations(
    small: &FilteredComplex,
    rs: &PersistencePairing,
    big: &FilteredComplex,
    rb: &PersistencePairing,
) -> usize {
    small
        .filtration_order()
        .iter()
        .enumerate()
        .filter(|&(i, s)| {
            rs.label(i) == Some(Label::Positive)
                && big
                    .index_of(s)
                    .is_some_and(|j| rb.label(j) != Some(Label::Positive))
        })
        .count()
}

fn run_replicate(params: &StabilizationParams, replicate: u64, attempt: u32) -> Result<Trajectory, ExperimentError> {
    let phi = PhiSpec::new(params.p).expect("validated");
    let d = params.d;
    let n_max = *params.n_grid.last().unwrap();
    let all = sample_poisson(params.lambda, &Window::centered(n_max, d).bounds(), params.seed, stream(replicate, attempt));
    let origin = Point {
        id: all.next_id(),
        coords: [0.0; 3],
    };
    let mut t = Trajectory {
        replicate,
        attempt,
        points: all.len(),
        costs: Vec::new(),
        mst_checked: 0,
        mst_failures: 0,
        monotone_checked: 0,
        monotone_violations: 0,
        replay_exact: None,
        single_exchange: None,
    };
    let mut previous: Option<(FilteredComplex, PersistencePairing)> = None;
    for (i, &n) in params.n_grid.iter().enumerate() {
        let pts: PointSet = restrict(&all, &Window::centered(n, d).bounds());
        let grown = pts.with_point(origin)?;
        let before = delaunay_complex(&pts, WeightMode::Alpha)?;
        let after = delaunay_complex(&grown, WeightMode::Alpha)?;
        let costs = costs_up_to(&before, &after, params.max_k(), phi)?;

        if params.p == 1.0 && n <= params.mst_max_n {
            let gain = kruskal_mst(&grown).total - kruskal_mst(&pts).total;
            t.mst_checked += 1;
            if (costs[1].dm - gain / 2.0).abs() > 1e-9 * gain.abs().max(1.0) {
                t.mst_failures += 1;
            }
        }

        let (rb, ra) = (reduce(&before), reduce(&after));
        t.monotone_checked += 1;
        t.monotone_violations += monotonicity_violations(&before, &rb, &after, &ra);
        if let Some((prev, rp)) = &previous {
            t.monotone_checked += 1;
            t.monotone_violations += monotonicity_violations(prev, rp, &before, &rb);
        }

        if params.replay && i + 1 == params.n_grid.len() {
            let mut exact = true;
            let mut single = true;
            for &k in &params.ks {
                let r = replay_add_one(&before, &after, k, phi)?;
                let c = &costs[k];
                exact &= r.total.dm.to_bits() == c.dm.to_bits()
                    && r.total.db.to_bits() == c.db.to_bits()
                    && r.total.dl.map(f64::to_bits) == c.dl.map(f64::to_bits);
                single &= r.single_exchange;
            }
            t.replay_exact = Some(exact);
            t.single_exchange = Some(single);
        }
        t.costs.push(costs);
        previous = Some((before, rb));
    }
    Ok(t)
}

/// Whether the trajectory of statistic `s` in degree `k` agrees over the
/// last two grid points; `None` with a single grid point or an undefined
/// statistic.
fn stabilized(t: &Trajectory, k: usize, s: usize, tol: f64) -> Option<bool> {
    let n = t.costs.len();
    if n < 2 {
        return None;
    }
    let (a, b) = (stat(&t.costs[n - 2][k], s)?, stat(&t.costs[n - 1][k], s)?);
    Some((a - b).abs() <= tol)
}

pub fn run(params: &StabilizationParams) -> Result<ExperimentReport, ExperimentError> {
    params.validate()?;
    let trajectories: Vec<Trajectory> = (0..params.replicates as u64)
        .into_par_iter()
        .map(|r| with_retries(r, params.max_attempts, |a| run_replicate(params, r, a)).map(|(t, _)| t))
        .collect::<Result<_, _>>()?;

    let mut report = ExperimentReport::new("stabilization", params);
    let mut columns = vec!["seed", "replicate", "attempt", "points"];
    let names: Vec<String> = params
        .ks
        .iter()
        .flat_map(|k| STATS.iter().flat_map(move |s| [format!("D0{s}_{k}"), format!("stable_{s}_{k}")]))
        .collect();
    columns.extend(names.iter().map(String::as_str));
    columns.extend(["mst_checked", "mst_failures", "monotone_checked", "monotone_violations", "replay_exact", "single_exchange"]);
    let mut records = Table::new(&columns);
    let mut long = Table::new(&["series", "replicate", "n", "value"]);
    for t in &trajectories {
        let mut row = vec![params.seed.to_string(), t.replicate.to_string(), t.attempt.to_string(), t.points.to_string()];
        for &k in &params.ks {
            for s in 0..3 {
                row.push(opt_cell(stat(&t.costs.last().unwrap()[k], s)));
                row.push(bool_cell(stabilized(t, k, s, params.tol)));
                for (i, c) in t.costs.iter().enumerate() {
                    if let Some(v) = stat(&c[k], s) {
                        long.push(vec![format!("D0{}_{k}", STATS[s]), t.replicate.to_string(), cell(params.n_grid[i]), cell(v)]);
                    }
                }
            }
        }
        row.extend([
            t.mst_checked.to_string(),
            t.mst_failures.to_string(),
            t.monotone_checked.to_string(),
            t.monotone_violations.to_string(),
            bool_cell(t.replay_exact),
            bool_cell(t.single_exchange),
        ]);
        records.push(row);
    }

    let mut fractions = serde_json::Map::new();
    let mut ok = true;
    for &k in &params.ks {
        for (s, name) in STATS.iter().enumerate() {
            let flags: Vec<bool> = trajectories.iter().filter_map(|t| stabilized(t, k, s, params.tol)).collect();
            let key = format!("{name}_{k}");
            if flags.is_empty() {
                fractions.insert(key, serde_json::Value::Null);
                continue;
            }
            let frac = flags.iter().filter(|&&b| b).count() as f64 / flags.len() as f64;
            let terminal: Vec<f64> = trajectories.iter().filter_map(|t| stat(&t.costs.last().unwrap()[k], s)).collect();
            ok &= frac >= params.min_fraction;
            report.lines.push(format!(
                "D0{name}_{k}: {:.1}% of trajectories stabilized (need {:.1}%)",
                100.0 * frac,
                100.0 * params.min_fraction
            ));
            fractions.insert(key, json!({ "fraction": frac, "terminal_mean": super::stats::mean(&terminal) }));
        }
    }
    let replayed: Vec<&Trajectory> = trajectories.iter().filter(|t| t.replay_exact.is_some()).collect();
    let replay_exact = replayed.iter().filter(|t| t.replay_exact == Some(true)).count();
    let single = replayed.iter().filter(|t| t.single_exchange == Some(true)).count();
    let mst_checked: usize = trajectories.iter().map(|t| t.mst_checked).sum();
    let mst_failures: usize = trajectories.iter().map(|t| t.mst_failures).sum();
    let mono_checked: usize = trajectories.iter().map(|t| t.monotone_checked).sum();
    let mono_violations: usize = trajectories.iter().map(|t| t.monotone_violations).sum();
    ok &= replay_exact == replayed.len() && mst_failures == 0 && mono_violations == 0;
    report.lines.push(format!("replay exact on {replay_exact}/{} replicates", replayed.len()));
    report.lines.push(format!("spanning tree oracle: {mst_failures} failures in {mst_checked} checks"));
    report
        .lines
        .push(format!("label monotonicity: {mono_violations} violations over {mono_checked} nested pairs"));
    for t in trajectories.iter().filter(|t| t.replay_exact == Some(false) || t.mst_failures > 0 || t.monotone_violations > 0) {
        report.failures.push(json!({ "seed": params.seed, "replicate": t.replicate, "attempt": t.attempt }));
    }
    report.summary = json!({
        "stabilized": fractions,
        "replay": { "replicates": replayed.len(), "exact": replay_exact, "single_exchange": single },
        "mst": { "checks": mst_checked, "failures": mst_failures },
        "label_monotonicity": { "pairs": mono_checked, "violations": mono_violations },
        "retries": trajectories.iter().map(|t| t.attempt as u64).sum::<u64>(),
    });
    report.ok = ok;
    report.records = records;
    report.long = long;
    Ok(report)
}
