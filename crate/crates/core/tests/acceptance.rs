//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs as a plain binary (`harness = false`). Pass criterion numbers as
//! arguments to run a subset, e.g. `cargo test --test acceptance -- 1 4`.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use betakde::bandwidth::{
    h_ref, h_ref_composed, i1_closed, i2_closed, oracle_bandwidth, oracle_rule, BetaParams, OracleVariant,
};
use betakde::distributions::DistributionSpec;
use betakde::harness::config::{ExperimentConfig, LabeledDistribution, QuadratureConfig};
use betakde::harness::experiment1::{run_experiment1, TrialRecord};
use betakde::harness::methods::{run_method, MethodContext, MethodId};
use betakde::kernels::{kernel_shape_params, rho, DensityModel, Family, Sample};
use betakde::metrics::{lscv_score, paired_t_test, t_two_sided_p, wilcoxon_from_differences, CvMode};
use betakde::quadrature::QuadratureRule;
use betakde::special::beta_log_pdf;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const GRID: [f64; 6] = [1.6, 2.0, 2.5, 3.5, 5.0, 8.0];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn bp(a: f64, b: f64) -> BetaParams {
    BetaParams::new(a, b).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Closed-form I₁ and I₂ against quadrature of their defining integrals.
fn closed_forms() -> Outcome {
    let rule = QuadratureRule::graded(24, 80, 0.15).unwrap();
    let mut worst: f64 = 0.0;
    for &a in &GRID {
        for &b in &GRID {
            let d = DistributionSpec::beta(a, b);
            let q1 = rule.integrate_points(|p| d.pdf_at(p) / (p.x * p.xc).sqrt()).unwrap();
            let q2 = rule
                .integrate_points(|p| (p.x * p.xc * d.second_derivative_at(p)).powi(2))
                .unwrap();
            worst = worst
                .max(rel(i1_closed(bp(a, b)).unwrap(), q1))
                .max(rel(i2_closed(bp(a, b)).unwrap(), q2));
        }
    }
    let pinned = [
        rel(i1_closed(bp(1.0, 1.0)).unwrap(), PI),
        rel(i2_closed(bp(2.0, 2.0)).unwrap(), 4.8),
        rel(i2_closed(bp(2.0, 3.0)).unwrap(), 1152.0 / 105.0),
    ];
    let pinned_ok = pinned.iter().all(|e| *e < 1e-12);
    outcome(
        worst <= 1e-6 && pinned_ok,
        format!("max rel err vs quadrature {worst:.2e}, pinned values ok: {pinned_ok}"),
    )
}

/// Simplified rule equals the composition of the two integrals.
fn rule_consistency() -> Outcome {
    let mut worst: f64 = 0.0;
    for &a in &GRID {
        for &b in &GRID {
            for n in [50, 2000] {
                worst = worst.max(rel(h_ref(bp(a, b), n).unwrap(), h_ref_composed(bp(a, b), n).unwrap()));
            }
        }
    }
    let h = h_ref(bp(2.0, 2.0), 100).unwrap();
    outcome(
        worst <= 1e-10 && (h - 0.07187).abs() <= 1e-4,
        format!("max rel diff {worst:.2e}, h_ref(2,2,100) = {h:.7}"),
    )
}

/// Quadrature oracle bandwidth against the closed-form rule.
fn oracle_agreement() -> Outcome {
    let rule = oracle_rule();
    let mut worst: f64 = 0.0;
    for &a in &GRID {
        for &b in &GRID {
            let d = DistributionSpec::beta(a, b);
            for n in [100, 2000] {
                let o = oracle_bandwidth(&d, n, OracleVariant::H2, &rule).unwrap();
                worst = worst.max(rel(o, h_ref(bp(a, b), n).unwrap()));
            }
        }
    }
    outcome(worst <= 1e-4, format!("max rel diff {worst:.2e}"))
}

/// ρ endpoints and continuity of the boundary-kernel shapes.
fn boundary_structure() -> Outcome {
    let mut worst_rho: f64 = 0.0;
    let mut worst_jump: f64 = 0.0;
    let eps = 1e-9;
    for k in 1..=24 {
        let h = k as f64 / 100.0;
        worst_rho = worst_rho
            .max((rho(0.0, h).unwrap() - 1.0).abs())
            .max((rho(2.0 * h, h).unwrap() - 2.0).abs());
        for join in [2.0 * h, 1.0 - 2.0 * h] {
            let lo = kernel_shape_params(join - eps, h).unwrap();
            let hi = kernel_shape_params(join + eps, h).unwrap();
            // Shapes vary like x/h, so a continuous join moves them by about eps/h.
            let scale = eps / h;
            worst_jump = worst_jump.max(((lo.p - hi.p).abs().max((lo.q - hi.q).abs())) / scale);
        }
    }
    outcome(
        worst_rho <= 1e-12 && worst_jump <= 10.0,
        format!("max |ρ - target| {worst_rho:.1e}, max join change {worst_jump:.2} x (eps/h)"),
    )
}

fn study_config(dists: &[(&str, DistributionSpec)], sizes: Vec<usize>, trials: usize, methods: Vec<MethodId>) -> ExperimentConfig {
    ExperimentConfig {
        distributions: dists
            .iter()
            .map(|(l, s)| LabeledDistribution {
                label: l.to_string(),
                spec: s.clone(),
            })
            .collect(),
        sample_sizes: sizes,
        trials,
        methods,
        root_seed: 20_240_601,
        quadrature: QuadratureConfig::default(),
        kurtosis_mode: Default::default(),
        output_path: "unused.csv".into(),
        timing: false,
        lscv_folds: 10,
    }
}

fn ise_by_cell(records: &[TrialRecord], method: MethodId) -> Vec<((String, usize, usize), f64)> {
    let mut v: Vec<_> = records
        .iter()
        .filter(|r| r.method == method)
        .map(|r| ((r.distribution.clone(), r.n, r.trial), r.ise.expect("nice density has ISE")))
        .collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

/// ISE ordering of the desk-scale study.
fn ise_ordering() -> Outcome {
    let methods = vec![
        MethodId::BetaRef,
        MethodId::BetaLSCV,
        MethodId::BetaISEmin,
        MethodId::BetaOracle,
        MethodId::ReflectSilverman,
    ];
    let cfg = study_config(
        &[("B(5,5)", DistributionSpec::beta(5.0, 5.0)), ("B(2,12)", DistributionSpec::beta(2.0, 12.0))],
        vec![100, 250, 500],
        200,
        methods,
    );
    let recs = run_experiment1(&cfg).unwrap();
    let mean = |m| {
        let v = ise_by_cell(&recs, m);
        v.iter().map(|x| x.1).sum::<f64>() / v.len() as f64
    };
    // (better, worse, strict)
    let orderings = [
        (MethodId::BetaISEmin, MethodId::BetaOracle, false),
        (MethodId::BetaOracle, MethodId::BetaRef, false),
        (MethodId::BetaRef, MethodId::ReflectSilverman, true),
        (MethodId::BetaRef, MethodId::BetaLSCV, true),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (better, worse, strict) in orderings {
        let a = ise_by_cell(&recs, better);
        let b = ise_by_cell(&recs, worse);
        assert!(a.iter().zip(&b).all(|(x, y)| x.0 == y.0), "cells must pair up");
        let pairs: Vec<(f64, f64)> = a.iter().zip(&b).map(|(x, y)| (x.1, y.1)).collect();
        let (ma, mb) = (mean(better), mean(worse));
        let p = paired_t_test(&pairs).map(|t| t.p_value).unwrap_or(1.0);
        let ordered = if strict { ma < mb } else { ma <= mb };
        let ok = ordered && p < 0.05;
        pass &= ok;
        parts.push(format!(
            "{better} {ma:.5} {} {worse} {mb:.5} (p={p:.2e}){}",
            if strict { "<" } else { "<=" },
            if ok { "" } else { " FAILS" }
        ));
    }
    outcome(pass, parts.join("; "))
}

/// Fallback rates on boundary-heavy and bimodal densities.
fn fallback_rates() -> Outcome {
    let rate = |label: &str, spec: DistributionSpec, n: usize| {
        let cfg = study_config(&[(label, spec)], vec![n], 200, vec![MethodId::BetaRef]);
        let recs = run_experiment1(&cfg).unwrap();
        recs.iter().filter(|r| r.used_fallback == Some(true)).count() as f64 / recs.len() as f64
    };
    let u = rate("B(0.5,0.5)", DistributionSpec::beta(0.5, 0.5), 250);
    let j = rate("B(0.8,2.5)", DistributionSpec::beta(0.8, 2.5), 250);
    let mix = DistributionSpec::Mixture {
        weights: vec![0.5, 0.5],
        components: vec![DistributionSpec::beta(10.0, 30.0), DistributionSpec::beta(30.0, 10.0)],
    };
    let m = rate("Mix(B(10,30),B(30,10))", mix, 500);
    outcome(
        u == 1.0 && j == 1.0 && m > 0.95,
        format!("B(0.5,0.5) {:.1}%, B(0.8,2.5) {:.1}%, mixture {:.1}%", 100.0 * u, 100.0 * j, 100.0 * m),
    )
}

/// Mass of the unnormalized boundary estimator on Beta(2,2) data.
fn mass_asymptotics() -> Outcome {
    let rule = QuadratureRule::default();
    let d = DistributionSpec::beta(2.0, 2.0);
    let hs = [0.02, 0.05, 0.1, 0.2];
    let mut mean_mass = Vec::new();
    let mut mean_dev = Vec::new();
    for &h in &hs {
        let mut masses = Vec::new();
        for seed in 0..50u64 {
            let s = d.sample(&mut ChaCha8Rng::seed_from_u64(7_000 + seed), 2000);
            let m = DensityModel::fit(Family::BetaF2, s, h).unwrap();
            masses.push(m.total_mass(&rule).unwrap());
        }
        mean_mass.push(masses.iter().sum::<f64>() / 50.0);
        mean_dev.push(masses.iter().map(|m| (m - 1.0).abs()).sum::<f64>() / 50.0);
    }
    let level_ok = hs
        .iter()
        .zip(&mean_mass)
        .skip(1)
        .all(|(h, m)| (m - (1.0 - h)).abs() <= 0.02);
    let x: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let y: Vec<f64> = mean_dev.iter().map(|v| v.ln()).collect();
    let (mx, my) = (x.iter().sum::<f64>() / 4.0, y.iter().sum::<f64>() / 4.0);
    let slope = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>()
        / x.iter().map(|a| (a - mx).powi(2)).sum::<f64>();
    let masses: Vec<String> = hs
        .iter()
        .zip(&mean_mass)
        .map(|(h, m)| format!("h={h}: {m:.5} (1-h={:.2})", 1.0 - h))
        .collect();
    outcome(
        level_ok && (slope - 1.0).abs() <= 0.2,
        format!("{}; slope {slope:.3}", masses.join(", ")),
    )
}

/// Median selection times of the reference rule and LSCV at n = 1000.
fn speed_ratio() -> Outcome {
    let d = DistributionSpec::beta(5.0, 5.0);
    let s = d.sample(&mut ChaCha8Rng::seed_from_u64(8), 1000);
    let ctx = MethodContext::default();
    let median_time = |m: MethodId, reps: usize| {
        let mut t: Vec<f64> = (0..reps)
            .map(|_| run_method(m, &s, None, &ctx).unwrap().fitted().unwrap().fit_time_s)
            .collect();
        t.sort_by(f64::total_cmp);
        t[reps / 2]
    };
    let t_ref = median_time(MethodId::BetaRef, 201);
    let t_lscv = median_time(MethodId::BetaLSCV, 5);
    let ratio = t_lscv / t_ref;
    outcome(
        t_ref <= 1e-3 && ratio >= 1000.0,
        format!("BetaRef {:.1} µs, BetaLSCV {:.3} s, ratio {ratio:.0}", t_ref * 1e6, t_lscv),
    )
}

/// Exact two-sided signed-rank p-value by enumerating all sign patterns.
fn exact_signed_rank_p(d: &[f64]) -> f64 {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].abs().total_cmp(&d[j].abs()));
    let mut rank = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && d[order[j + 1]].abs() == d[order[i]].abs() {
            j += 1;
        }
        for k in i..=j {
            rank[order[k]] = (i + j + 2) as f64 / 2.0;
        }
        i = j + 1;
    }
    let center = n as f64 * (n as f64 + 1.0) / 4.0;
    let observed: f64 = (0..n).filter(|&k| d[k] > 0.0).map(|k| rank[k]).sum();
    let dev = (observed - center).abs();
    let hits = (0u32..1 << n)
        .filter(|mask| {
            let w: f64 = (0..n).filter(|k| mask >> k & 1 == 1).map(|k| rank[k]).sum();
            (w - center).abs() >= dev - 1e-9
        })
        .count();
    hits as f64 / (1u64 << n) as f64
}

/// Signed-rank normal approximation against enumeration, and the t tail.
fn test_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut worst: f64 = 0.0;
    let mut worst_from_7: f64 = 0.0;
    let mut misses = 0;
    for _ in 0..100 {
        let n = rng.random_range(6..=12);
        let shift: f64 = rng.random_range(-1.0..1.0);
        let d: Vec<f64> = (0..n)
            .map(|_| shift + rng.sample::<f64, _>(StandardNormal))
            .collect();
        let approx = wilcoxon_from_differences(&d).unwrap().p_value;
        let gap = (approx - exact_signed_rank_p(&d)).abs();
        worst = worst.max(gap);
        if n >= 7 {
            worst_from_7 = worst_from_7.max(gap);
        }
        if gap > 0.03 {
            misses += 1;
        }
    }
    let p = t_two_sided_p(2.262, 9.0).unwrap();
    outcome(
        worst <= 0.03 && (p - 0.050).abs() <= 0.005,
        format!(
            "max |approx - exact| {worst:.4} ({misses}/100 vectors over 0.03; {worst_from_7:.4} for n >= 7); t-test p {p:.5}"
        ),
    )
}

/// Two `simulate` runs of the shipped desk config give identical bytes.
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/desk.toml");
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_betakde"))
            .args(["simulate", "--quiet", "--trials", "1", "--config"])
            .arg(&config)
            .arg("--output")
            .arg(&out)
            .env_remove("BETAKDE_SEED")
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv");
    let b = run("b.csv");
    let rows = a.iter().filter(|&&c| c == b'\n').count();
    outcome(a == b && rows > 1, format!("{} bytes, {rows} lines, identical: {}", a.len(), a == b))
}

/// One kernel straight from its definition.
fn kernel(family: Family, x: f64, xi: f64, h: f64) -> f64 {
    let phi = |u: f64| (-0.5 * (u / h).powi(2)).exp() / (h * (2.0 * PI).sqrt());
    let beta = |t: f64, p: f64, q: f64| beta_log_pdf(t, p, q).unwrap().exp();
    match family {
        Family::BetaF1 => beta(xi, x / h + 1.0, (1.0 - x) / h + 1.0),
        Family::BetaF2 => {
            let r = |t: f64| 2.0 * h * h + 2.5 - (4.0 * h.powi(4) + 6.0 * h * h + 2.25 - t * t - t / h).sqrt();
            if x < 2.0 * h {
                beta(xi, r(x), (1.0 - x) / h)
            } else if x > 1.0 - 2.0 * h {
                beta(xi, x / h, r(1.0 - x))
            } else {
                beta(xi, x / h, (1.0 - x) / h)
            }
        }
        Family::GaussLogit { clip_epsilon } => {
            let c = |v: f64| v.clamp(clip_epsilon, 1.0 - clip_epsilon);
            let logit = |v: f64| (v / (1.0 - v)).ln();
            phi(logit(c(x)) - logit(c(xi))) / (c(x) * (1.0 - c(x)))
        }
        Family::GaussReflect => phi(x - xi) + phi(x + xi) + phi(2.0 - x - xi),
    }
}

/// Exact-LOO LSCV against a from-definition expansion.
fn lscv_definition() -> Outcome {
    let rule = QuadratureRule::default();
    let families = [Family::BetaF1, Family::BetaF2, Family::gauss_logit(), Family::GaussReflect];
    let data = [0.04, 0.37, 0.5, 0.83, 0.99];
    let mut worst: f64 = 0.0;
    for family in families {
        for n in 2..=5 {
            let v = &data[..n];
            for h in [0.02, 0.07, 0.15, 0.23] {
                let fhat = |x: f64| v.iter().map(|&xi| kernel(family, x, xi, h)).sum::<f64>() / n as f64;
                let square: f64 = rule.nodes().zip(rule.weights()).map(|(x, w)| w * fhat(x).powi(2)).sum();
                let mut cross = 0.0;
                for i in 0..n {
                    let loo: f64 = (0..n).filter(|&j| j != i).map(|j| kernel(family, v[i], v[j], h)).sum();
                    cross += loo / (n - 1) as f64;
                }
                let want = square - 2.0 * cross / n as f64;
                let got = lscv_score(&Sample::new(v.to_vec()).unwrap(), family, h, &rule, CvMode::ExactLoo).unwrap();
                worst = worst.max((got - want).abs() / want.abs().max(1.0));
            }
        }
    }
    outcome(worst <= 1e-12, format!("max relative difference {worst:.2e}"))
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "closed-form identity suite", budget: Some(Duration::from_secs(5)), run: closed_forms },
        Criterion { id: 2, name: "rule consistency", budget: Some(Duration::from_secs(1)), run: rule_consistency },
        Criterion { id: 3, name: "oracle agreement", budget: Some(Duration::from_secs(30)), run: oracle_agreement },
        Criterion { id: 4, name: "boundary-kernel structure", budget: Some(Duration::from_secs(1)), run: boundary_structure },
        Criterion { id: 5, name: "desk-scale ISE ordering", budget: Some(Duration::from_secs(30 * 60)), run: ise_ordering },
        Criterion { id: 6, name: "fallback behavior", budget: Some(Duration::from_secs(60)), run: fallback_rates },
        Criterion { id: 7, name: "mass-error asymptotics", budget: Some(Duration::from_secs(120)), run: mass_asymptotics },
        Criterion { id: 8, name: "speed ratio", budget: Some(Duration::from_secs(300)), run: speed_ratio },
        Criterion { id: 9, name: "statistical-test oracles", budget: Some(Duration::from_secs(10)), run: test_oracles },
        Criterion { id: 10, name: "determinism", budget: None, run: determinism },
        Criterion { id: 11, name: "LSCV from-definition equivalence", budget: Some(Duration::from_secs(5)), run: lscv_definition },
    ];
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for c in criteria.iter().filter(|c| selected.is_empty() || selected.contains(&c.id)) {
        let start = Instant::now();
        let out = (c.run)();
        let elapsed = start.elapsed();
        let in_time = c.budget.is_none_or(|b| elapsed <= b);
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget = c.budget.map(|b| format!(" / {:.0?}", b)).unwrap_or_default();
        println!(
            "{} {:>2} {}: {} [{:.2?}{}{}]",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            out.detail,
            elapsed,
            budget,
            if in_time { "" } else { ", over budget" }
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
