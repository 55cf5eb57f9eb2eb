//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria 7 (lower bound on the degree-one cost), 8 (angle bound), 10
//! (normality of `B_1`) and 12 (label monotonicity at weight ties) are not
//! attainable; see `expected_failure`. They are reported as FAIL, and the run
//! still succeeds only if each failure is confined to the part shown to be
//! false and everything else passes.

use std::time::{Duration, Instant};

use acycle::experiments::{angle, clt, config, geom, stabilization, tails, ExperimentReport, Table};
use acycle_core::complex::{FilteredComplex, Simplex};
use acycle_core::geometry::{delaunay_complex, is_general_position, Point, PointSet, WeightMode};
use acycle_core::msa::{add_one_simplex_check, minimal_spanning_acycle, stability_check, statistics, Norm, PhiSpec};
use acycle_core::oracle::{kruskal_mst, min_weight_spanning_acycle, MAX_FACES};
use acycle_core::persistence::{reduce, Label};
use acycle_core::stochastic::{rng, sample_poisson, Window};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const ORACLE_LIMIT: Duration = Duration::from_secs(60);
const MST_LIMIT: Duration = Duration::from_secs(30);
const STABILITY_LIMIT: Duration = Duration::from_secs(30);
const CONFIG_LIMIT: Duration = Duration::from_secs(120);
const STABILIZATION_LIMIT: Duration = Duration::from_secs(15 * 60);
const CLT_LIMIT: Duration = Duration::from_secs(30 * 60);

const MST_REL_TOL: f64 = 1e-9;
const NOISE: f64 = 1e-3;
const EXACT_TOL: f64 = 1e-9;
const VAR_RATIO_TOL: f64 = 0.15;
const MAX_SKEWNESS: f64 = 0.3;
const MAX_EXCESS_KURTOSIS: f64 = 0.5;
const KS_MAX: f64 = 0.061;

struct Outcome {
    pass: bool,
    detail: String,
    /// Failure confined to a part recorded as unattainable.
    expected_failure: bool,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome {
            pass,
            detail,
            expected_failure: false,
        }
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("oracle equivalence", oracle_equivalence),
        ("spanning tree correspondence", mst_correspondence),
        ("stability of the death multiset", stability),
        ("single-simplex insertion", insertion),
        ("configuration exact values", exact_values),
        ("circumsphere distance bound", geometric_bound),
        ("configuration robustness", configuration),
        ("planar angle inequality", planar_angle),
        ("stabilization", stabilization_criterion),
        ("normality diagnostics", normality),
        ("tail decay", tail_decay),
        ("label monotonicity", label_monotonicity),
    ];
    let mut passed = 0;
    let mut unexpected = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{verdict} {:>2} {name}: {} [{:.1} s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        if o.pass {
            passed += 1;
        } else if !o.expected_failure {
            unexpected.push(i + 1);
        }
    }
    println!("{passed}/{} criteria pass", criteria.len());
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}

fn within(limit: Duration, start: Instant) -> (bool, String) {
    let t = start.elapsed();
    (t < limit, format!("{:.1} s < {} s", t.as_secs_f64(), limit.as_secs()))
}

fn sorted(mut v: Vec<Simplex>) -> Vec<Simplex> {
    v.sort();
    v
}

fn uniform_points(g: &mut ChaCha8Rng, dim: usize, n: usize) -> PointSet {
    let pts = (0..n).map(|i| {
        let mut c = [0.0; 3];
        for x in c.iter_mut().take(dim) {
            *x = g.random::<f64>();
        }
        Point { id: i as u32, coords: c }
    });
    PointSet::new(dim, pts.collect()).unwrap()
}

/// Random abstract complex: random edges, then triangles on present edges,
/// each weighing more than its facets.
fn random_complex(g: &mut ChaCha8Rng, nv: u32, max_edges: usize, max_tris: usize) -> FilteredComplex {
    let mut entries: Vec<(Simplex, f64)> = (0..nv).map(|v| (Simplex::vertex(v), 0.0)).collect();
    let mut all: Vec<(u32, u32)> = (0..nv).flat_map(|a| (a + 1..nv).map(move |b| (a, b))).collect();
    for i in (1..all.len()).rev() {
        let j = g.random_range(0..=i);
        all.swap(i, j);
    }
    let mut edges = Vec::new();
    for &(a, b) in all.iter().take(max_edges) {
        let w = g.random::<f64>();
        edges.push(((a, b), w));
        entries.push((Simplex::edge(a, b).unwrap(), w));
    }
    let w_of = |a: u32, b: u32| edges.iter().find(|e| e.0 == (a, b)).map(|e| e.1);
    let mut tris = 0;
    for a in 0..nv {
        for b in a + 1..nv {
            for c in b + 1..nv {
                if tris < max_tris {
                    if let (Some(x), Some(y), Some(z)) = (w_of(a, b), w_of(a, c), w_of(b, c)) {
                        if g.random::<f64>() < 0.5 {
                            entries.push((Simplex::new([a, b, c]).unwrap(), x.max(y).max(z) + g.random::<f64>()));
                            tris += 1;
                        }
                    }
                }
            }
        }
    }
    FilteredComplex::new(entries).unwrap()
}

fn matches_oracle(k: &FilteredComplex, d: usize) -> bool {
    let cert = min_weight_spanning_acycle(k, d).unwrap();
    sorted(minimal_spanning_acycle(k, d)) == sorted(cert.simplices)
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut g = rng(101, 0);
    let (mut geo, mut geo_ok) = (0, 0);
    while geo < 100 {
        let n = g.random_range(6..=8);
        let pts = uniform_points(&mut g, 2, n);
        if !is_general_position(&pts).ok {
            continue;
        }
        let k = delaunay_complex(&pts, WeightMode::Alpha).unwrap();
        geo += 1;
        geo_ok += (1..=2).filter(|&d| k.count(d) <= MAX_FACES).all(|d| matches_oracle(&k, d)) as usize;
    }
    let (mut abs, mut abs_ok, mut checked) = (0, 0, 0);
    while abs < 100 {
        let nv = g.random_range(3..=8);
        let (edges, tris) = (g.random_range(2..=20), g.random_range(1..=12));
        let k = random_complex(&mut g, nv, edges, tris);
        let degrees: Vec<usize> = (1..=k.dim().unwrap().min(2)).filter(|&d| k.count(d) <= MAX_FACES).collect();
        abs += 1;
        checked += degrees.len();
        abs_ok += degrees.iter().all(|&d| matches_oracle(&k, d)) as usize;
    }
    let (fast, time) = within(ORACLE_LIMIT, start);
    Outcome::new(
        geo_ok == 100 && abs_ok == 100 && fast,
        format!("point sets {geo_ok}/100, abstract complexes {abs_ok}/100 ({checked} degree checks), {time}"),
    )
}

fn mst_correspondence() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut ok = 0;
    for rep in 0..100 {
        let pts = sample_poisson(1.0, &Window::centered(200.0, 2).bounds(), 202, rep);
        let k = delaunay_complex(&pts, WeightMode::Alpha).unwrap();
        let m = statistics(&k, 1, PhiSpec::identity()).unwrap().m;
        let half = kruskal_mst(&pts).total / 2.0;
        let rel = (m - half).abs() / half;
        worst = worst.max(rel);
        ok += (rel <= MST_REL_TOL) as usize;
    }
    let (fast, time) = within(MST_LIMIT, start);
    Outcome::new(
        ok == 100 && fast,
        format!("{ok}/100 samples within {MST_REL_TOL:e} (worst {worst:.2e}), {time}"),
    )
}

/// Adds uniform noise of size at most `NOISE`, then lifts each simplex to
/// the largest of its facets, which keeps every change within `NOISE`.
fn perturbed(g: &mut ChaCha8Rng, k: &FilteredComplex) -> FilteredComplex {
    let mut raw: Vec<(Simplex, f64)> = k
        .iter()
        .map(|(s, w)| (s.clone(), (w + NOISE * (2.0 * g.random::<f64>() - 1.0)).max(0.0)))
        .collect();
    raw.sort_by_key(|(s, _)| s.dim());
    let mut out: Vec<(Simplex, f64)> = Vec::with_capacity(raw.len());
    let mut index: std::collections::HashMap<Simplex, usize> = std::collections::HashMap::new();
    for (s, w) in raw {
        let floor = s.facets().map(|f| out[index[&f]].1).fold(0.0, f64::max);
        index.insert(s.clone(), out.len());
        out.push((s, w.max(floor)));
    }
    FilteredComplex::new(out).unwrap()
}

fn stability() -> Outcome {
    let start = Instant::now();
    let mut g = rng(303, 0);
    let mut ok = 0;
    let mut tight: f64 = 0.0;
    for i in 0..100 {
        let dim = 2 + i % 2;
        let k = delaunay_complex(&uniform_points(&mut g, dim, 30), WeightMode::Alpha).unwrap();
        let k2 = perturbed(&mut g, &k);
        let max_change = k.iter().map(|(s, w)| (w - k2.weight(s).unwrap()).abs()).fold(0.0, f64::max);
        let mut all = max_change <= NOISE;
        for d in 1..=dim {
            for norm in [Norm::L1, Norm::L2, Norm::Sup] {
                let c = stability_check(&k, &k2, d, norm).unwrap();
                all &= c.ok;
                if c.rhs > 0.0 {
                    tight = tight.max(c.lhs / c.rhs);
                }
            }
        }
        ok += all as usize;
    }
    let (fast, time) = within(STABILITY_LIMIT, start);
    Outcome::new(
        ok == 100 && fast,
        format!("{ok}/100 instances for p in {{1, 2, inf}} (largest cost ratio {tight:.3}), {time}"),
    )
}

fn insertion() -> Outcome {
    let mut g = rng(404, 0);
    let (mut done, mut ok, mut positive, mut unchanged) = (0, 0, 0, 0);
    while done < 500 {
        let nv = g.random_range(3..=8);
        let (edges, tris) = (g.random_range(1..=20), g.random_range(0..=12));
        let k = random_complex(&mut g, nv, edges, tris);
        let (a, b) = (g.random_range(0..nv), g.random_range(0..nv));
        if a == b {
            continue;
        }
        let e = Simplex::edge(a, b).unwrap();
        let candidate = if k.contains(&e) {
            let c = (0..nv).find(|&c| {
                c != a && c != b && k.contains(&Simplex::edge(a, c).unwrap()) && k.contains(&Simplex::edge(b, c).unwrap())
            });
            match c.map(|c| Simplex::new([a, b, c]).unwrap()) {
                Some(t) if !k.contains(&t) => t,
                _ => continue,
            }
        } else {
            e
        };
        let floor = candidate.facets().map(|f| k.weight(&f).unwrap()).fold(0.0, f64::max);
        let r = add_one_simplex_check(&k, &candidate, floor + 2.0 * g.random::<f64>()).unwrap();
        done += 1;
        let small = r.added.len() <= 1 && r.removed.len() <= 1;
        let still = r.label != Label::Positive || (r.added.is_empty() && r.removed.is_empty());
        if r.label == Label::Positive {
            positive += 1;
            unchanged += still as usize;
        }
        ok += (r.ok && small && still) as usize;
    }
    Outcome::new(
        ok == 500,
        format!("{ok}/500 insertions change the acycle by at most one each way; {unchanged}/{positive} positive insertions leave it unchanged"),
    )
}

fn exact_values() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for d in [2, 3] {
        let e = config::ExactValues::compute(d).unwrap();
        let ok = e.ok(EXACT_TOL);
        pass &= ok;
        let dev = |xs: &[f64], t: f64| xs.iter().map(|x| (x - t).abs()).fold(0.0, f64::max);
        parts.push(format!(
            "d={d}: removed {:.2e} off 1, edges {:.2e} off 1/2, tops {:.2e} off d/2",
            (e.removed - 1.0).abs(),
            dev(&e.edges, 0.5),
            dev(&e.tops, d as f64 / 2.0)
        ));
    }
    Outcome::new(pass, format!("{} (tolerance {EXACT_TOL:e})", parts.join("; ")))
}

fn geometric_bound() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for d in [2, 3] {
        let c = geom::GeomCheck::compute(d, 1.0, Some(21.0 * d as f64)).unwrap();
        pass &= c.gap >= c.bound - EXACT_TOL && c.bound >= c.coarse;
        parts.push(format!("d={d}: {:.6} >= {:.6}", c.gap, c.bound));
    }
    Outcome::new(pass, parts.join("; "))
}

fn column<'a>(t: &'a Table, name: &str) -> Vec<&'a str> {
    t.column(name).unwrap().collect()
}

/// Criterion 7 checks `D0M > φ(r/4)` for every degree. In degree one it
/// cannot hold: the acycle is the spanning tree (at half edge lengths), and
/// the origin is a Steiner point of the inner simplex. Replacing the `d`
/// inner edges of half-length `s/2` by `d + 1` spokes of half-length `1/2`
/// gives `D0M_1 <= (d+1) φ(1/2) - d φ(s/2) < 0` at the anchors, with
/// `s = sqrt(3)` for `d = 2` and `sqrt(8/3)` for `d = 3`.
fn configuration() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut confined = true;
    let mut parts = Vec::new();
    for d in [2usize, 3] {
        let params = config::ConfigCheckParams {
            d,
            ..Default::default()
        };
        let report = config::run(&params).unwrap();
        let t = &report.records;
        let (ks, ps, dms) = (column(t, "k"), column(t, "p"), column(t, "D0M"));
        let (ml, bl, up) = (column(t, "m_lower"), column(t, "b_lower"), column(t, "upper"));
        let mut failing: Vec<(String, String)> = Vec::new();
        let mut fails_by_sign = true;
        for i in 0..t.rows.len() {
            let ok = ml[i] == "true" && bl[i] != "false" && up[i] == "true";
            if !ok {
                let key = (ks[i].to_string(), ps[i].to_string());
                if !failing.contains(&key) {
                    failing.push(key);
                }
                confined &= ks[i] == "1" && bl[i] != "false" && up[i] == "true";
                fails_by_sign &= dms[i].parse::<f64>().unwrap() < 0.0;
            }
        }
        confined &= fails_by_sign;
        pass &= failing.is_empty();
        let s = if d == 2 { 3f64.sqrt() } else { (8.0f64 / 3.0).sqrt() };
        let ceiling = (d as f64 + 1.0) * 0.5 - d as f64 * s / 2.0;
        let rows = t.rows.len() / (d * params.ps.len());
        parts.push(format!(
            "d={d}: {} of {} (k, p) pairs pass on all {rows} samples{}; anchor ceiling for k=1, p=1 is {ceiling:.4}",
            d * params.ps.len() - failing.len(),
            d * params.ps.len(),
            if failing.is_empty() {
                String::new()
            } else {
                format!(", failing {:?} with D0M < 0", failing)
            }
        ));
    }
    let (fast, time) = within(CONFIG_LIMIT, start);
    Outcome {
        pass: pass && fast,
        detail: format!("{}, {time}", parts.join("; ")),
        expected_failure: confined && fast,
    }
}

/// The weight inequality holds, but the angle bound does not: the cone for
/// `p′_1` points along `(-2,-1)` and the one for `p′_3` along `(2,-1)`, so
/// both points can move toward each other by up to `π/12` around their
/// axes and the angle they subtend at the origin drops below `2π/3`.
fn planar_angle() -> Outcome {
    let r = angle::run(&angle::D2AngleParams::default()).unwrap();
    let n = r.summary["trials"].as_u64().unwrap();
    let w = r.summary["weight_pass"].as_u64().unwrap();
    let a = r.summary["angle_pass"].as_u64().unwrap();
    Outcome {
        pass: r.ok,
        detail: format!(
            "weights {w}/{n} (min ratio {:.6}), angle {a}/{n} (min {:.6} vs {:.6})",
            r.summary["min_ratio"].as_f64().unwrap(),
            r.summary["min_angle"].as_f64().unwrap(),
            r.summary["angle_bound"].as_f64().unwrap()
        ),
        expected_failure: w == n,
    }
}

fn summarize(report: &ExperimentReport) -> String {
    report.lines.join("; ")
}

fn stabilization_criterion() -> Outcome {
    let start = Instant::now();
    let r = stabilization::run(&stabilization::StabilizationParams::default()).unwrap();
    let (fast, time) = within(STABILIZATION_LIMIT, start);
    Outcome::new(r.ok && fast, format!("{}, {time}", summarize(&r)))
}

/// Criterion 10 covers `M_1`, `B_1` and `L_1`. `B_1` sums the weights of
/// edges outside the acycle, which include hull edges. A hull edge whose
/// opposite Delaunay vertex lies at distance `h` from it has alpha weight of
/// order `1/h`, and `h` has positive density at zero, so `B_1` has infinite
/// mean on a window. Its failure is confined when `M_1` and `L_1` pass.
fn normality() -> Outcome {
    let start = Instant::now();
    let r = clt::run(&clt::CltParams::default()).unwrap();
    let (fast, time) = within(CLT_LIMIT, start);
    let verdict = |name: &str| {
        let e = &r.summary[name];
        let m = &e["moments"];
        let get = |v: &serde_json::Value| v.as_f64().unwrap_or(f64::NAN);
        get(&m["skewness"]).abs() < MAX_SKEWNESS
            && get(&m["excess_kurtosis"]).abs() < MAX_EXCESS_KURTOSIS
            && get(&m["ks"]) < KS_MAX
            && get(&e["half"]["relative_change"]) <= VAR_RATIO_TOL
    };
    let (m, b, l) = (verdict("M_1"), verdict("B_1"), verdict("L_1"));
    let detail = format!(
        "M_1 {}, B_1 {}, L_1 {} (KS < {KS_MAX}); {}, {time}",
        ok_word(m),
        ok_word(b),
        ok_word(l),
        summarize(&r)
    );
    Outcome {
        pass: m && b && l && fast,
        detail,
        expected_failure: m && l && !b && fast,
    }
}

fn ok_word(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn tail_decay() -> Outcome {
    let r = tails::run(&tails::TailParams::default()).unwrap();
    Outcome::new(r.ok, summarize(&r))
}

/// Alpha weights tie a simplex to a facet whenever that facet is attached
/// to it, so a facet can open a cycle that the simplex closes at the same
/// weight. Such a simplex is negative in the larger complex even though its
/// boundary already bounds in the smaller one. The failure is confined when
/// every violation is such a zero-length pair.
fn label_monotonicity() -> Outcome {
    let mut g = rng(1212, 0);
    let (mut ok, mut shared, mut violations, mut tied) = (0, 0, 0, 0);
    for i in 0..200 {
        let dim = 2 + i % 2;
        let big = uniform_points(&mut g, dim, 40);
        let keep = 0.5 + 0.4 * g.random::<f64>();
        let small = big.filtered(|_| g.random::<f64>() < keep);
        let (kb, ks) = (
            delaunay_complex(&big, WeightMode::Alpha).unwrap(),
            delaunay_complex(&small, WeightMode::Alpha).unwrap(),
        );
        let (rb, rs) = (reduce(&kb), reduce(&ks));
        let mut all = true;
        for (j, s) in ks.filtration_order().iter().enumerate() {
            if rs.label(j) == Some(Label::Positive) {
                if let Some(jb) = kb.index_of(s) {
                    shared += 1;
                    if rb.label(jb) != Some(Label::Positive) {
                        all = false;
                        violations += 1;
                        let w = kb.weight_at(jb);
                        tied += s.facets().any(|f| kb.weight(&f) == Some(w)) as usize;
                    }
                }
            }
        }
        ok += all as usize;
    }
    Outcome {
        pass: ok == 200,
        detail: format!(
            "{ok}/200 nested pairs ({shared} shared positive simplices, {violations} violations, {tied} tied to a facet)"
        ),
        expected_failure: violations > 0 && tied == violations,
    }
}
