//! Normality diagnostics for the statistics on growing windows.

use acycle_core::geometry::{delaunay_complex, WeightMode};
use acycle_core::msa::{statistics_all, PhiSpec};
use acycle_core::stochastic::{restrict, sample_poisson, Window};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::stats::Moments;
use super::{cell, invalid, stream, with_retries, ExperimentError, ExperimentReport, Table};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CltParams {
    pub lambda: f64,
    pub d: usize,
    pub k: usize,
    pub p: f64,
    /// Window volume.
    pub n: f64,
    pub replicates: usize,
    pub seed: u64,
    /// Also evaluate on the half-volume window inside each sample.
    pub compare_half: bool,
    pub var_ratio_tol: f64,
    pub max_abs_skewness: f64,
    pub max_abs_excess_kurtosis: f64,
    /// The KS threshold is this factor times `1.36 / sqrt(R)`.
    pub ks_factor: f64,
    pub max_attempts: u32,
}

impl Default for CltParams {
    fn default() -> Self {
        CltParams {
            lambda: 1.0,
            d: 2,
            k: 1,
            p: 1.0,
            n: 4096.0,
            replicates: 500,
            seed: 1,
            compare_half: true,
            var_ratio_tol: 0.15,
            max_abs_skewness: 0.3,
            max_abs_excess_kurtosis: 0.5,
            ks_factor: 1.5,
            max_attempts: 8,
        }
    }
}

impl CltParams {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.replicates < 100 {
            return Err(invalid(format!("at least 100 replicates are required (got {})", self.replicates)));
        }
        if !(2..=3).contains(&self.d) || self.k == 0 || self.k > self.d {
            return Err(invalid("need d in {2, 3} and 1 <= k <= d"));
        }
        if !(self.lambda > 0.0 && self.n > 0.0) {
            return Err(invalid("lambda and n must be positive"));
        }
        PhiSpec::new(self.p).map_err(|e| invalid(e.to_string()))?;
        Ok(())
    }

    pub fn ks_threshold(&self) -> f64 {
        self.ks_factor * 1.36 / (self.replicates as f64).sqrt()
    }
}

/// Statistics checked for normality: `M` for every `k`, `B` and `L`
/// (the latter for `p = 1`) only below the top degree.
fn names(params: &CltParams) -> Vec<&'static str> {
    let mut v = vec!["M"];
    if params.k < params.d {
        v.push("B");
        if params.p == 1.0 {
            v.push("L");
        }
    }
    v
}

fn values(r: &acycle_core::MsaResult, names: &[&str]) -> Vec<f64> {
    names
        .iter()
        .map(|&n| match n {
            "M" => r.m,
            "B" => r.b,
            _ => r.l.expect("identity weights"),
        })
        .collect()
}

pub fn run(params: &CltParams) -> Result<ExperimentReport, ExperimentError> {
    params.validate()?;
    let phi = PhiSpec::new(params.p).unwrap();
    let names = names(params);
    let sizes: Vec<f64> = if params.compare_half { vec![params.n, params.n / 2.0] } else { vec![params.n] };
    let rows: Vec<(u64, u32, Vec<Vec<f64>>)> = (0..params.replicates as u64)
        .into_par_iter()
        .map(|r| {
            with_retries(r, params.max_attempts, |attempt| {
                let big = Window::centered(params.n, params.d).bounds();
                let all = sample_poisson(params.lambda, &big, params.seed, stream(r, attempt));
                sizes
                    .iter()
                    .map(|&n| {
                        let pts = restrict(&all, &Window::centered(n, params.d).bounds());
                        let c = delaunay_complex(&pts, WeightMode::Alpha)?;
                        let st = statistics_all(&c, params.k, phi)?;
                        Ok(values(&st[params.k], &names))
                    })
                    .collect::<Result<Vec<_>, ExperimentError>>()
            })
            .map(|(v, a)| (r, a, v))
        })
        .collect::<Result<_, _>>()?;

    let mut report = ExperimentReport::new("clt", params);
    let mut cols = vec!["seed".to_string(), "replicate".to_string(), "attempt".to_string()];
    for n in &sizes {
        for s in &names {
            cols.push(format!("{s}_{}_{}", params.k, n));
        }
    }
    let mut records = Table::new(&cols.iter().map(String::as_str).collect::<Vec<_>>());
    let mut long = Table::new(&["series", "n", "replicate", "value"]);
    for (r, a, v) in &rows {
        let mut row = vec![params.seed.to_string(), r.to_string(), a.to_string()];
        for (i, n) in sizes.iter().enumerate() {
            for (j, s) in names.iter().enumerate() {
                row.push(cell(v[i][j]));
                long.push(vec![format!("{s}_{}", params.k), cell(*n), r.to_string(), cell(v[i][j])]);
            }
        }
        records.push(row);
    }

    let ks_max = params.ks_threshold();
    let mut summary = serde_json::Map::new();
    let mut ok = true;
    for (j, s) in names.iter().enumerate() {
        let sample = |i: usize| -> Vec<f64> { rows.iter().map(|r| r.2[i][j]).collect() };
        let main = Moments::of(&sample(0));
        let var_n = main.variance / params.n;
        let mut entry = json!({ "moments": &main, "var_over_n": var_n });
        let name = format!("{s}_{}", params.k);
        let mut pass = main.skewness.abs() < params.max_abs_skewness
            && main.excess_kurtosis.abs() < params.max_abs_excess_kurtosis
            && main.ks < ks_max;
        let mut line = format!(
            "{name}: Var/n {var_n:.5}, skewness {:+.4}, excess kurtosis {:+.4}, KS {:.4} (< {ks_max:.4})",
            main.skewness, main.excess_kurtosis, main.ks
        );
        if sizes.len() == 2 {
            let half = Moments::of(&sample(1));
            let var_half = half.variance / sizes[1];
            let rel = (var_n - var_half).abs() / var_half;
            pass &= rel <= params.var_ratio_tol;
            entry["half"] = json!({ "n": sizes[1], "moments": &half, "var_over_n": var_half, "relative_change": rel });
            line.push_str(&format!(", Var/n at n/2 {var_half:.5} (change {:.1}%)", 100.0 * rel));
        }
        entry["pass"] = json!(pass);
        ok &= pass;
        report.lines.push(format!("{line}: {}", if pass { "ok" } else { "FAIL" }));
        summary.insert(name, entry);
    }
    summary.insert("ks_threshold".into(), json!(ks_max));
    report.summary = serde_json::Value::Object(summary);
    report.ok = ok;
    report.records = records;
    report.long = long;
    Ok(report)
}
