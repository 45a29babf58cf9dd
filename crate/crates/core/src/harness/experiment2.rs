//! Real-data comparison: full-sample LSCV plus repeated k-fold held-out scores.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bandwidth::KurtosisMode;
use crate::error::{Error, Result};
use crate::harness::methods::{run_method, MethodContext, MethodId, MethodResult};
use crate::harness::seeds::derive_seed;
use crate::kernels::Sample;
use crate::metrics::{
    fold_indices, heldout_log_likelihood, heldout_mean_density, lscv_score, wilcoxon_signed_rank, CvMode,
    DEFAULT_LOGLIK_FLOOR,
};
use crate::quadrature::QuadratureRule;

pub const MIN_OBSERVATIONS: usize = 20;

pub const FOLD_HEADER: [&str; 8] = [
    "variable",
    "method",
    "repeat",
    "fold",
    "h",
    "used_fallback",
    "heldout_mean_density",
    "heldout_loglik",
];

pub const SUMMARY_HEADER: [&str; 13] = [
    "variable",
    "method",
    "n",
    "h",
    "used_fallback",
    "fit_time_s",
    "lscv_exact",
    "fallback_rate",
    "mean_heldout_density",
    "sd_heldout_density",
    "mean_heldout_loglik",
    "sd_heldout_loglik",
    "wilcoxon_p_density",
];

#[derive(Clone, Debug)]
pub struct RealDataConfig {
    pub repeats: usize,
    pub folds: usize,
    pub root_seed: u64,
    pub methods: Vec<MethodId>,
    pub kurtosis_mode: KurtosisMode,
    pub rule: QuadratureRule,
    pub timing: bool,
    pub loglik_floor: f64,
}

impl Default for RealDataConfig {
    fn default() -> Self {
        RealDataConfig {
            repeats: 10,
            folds: 10,
            root_seed: 20_240_601,
            methods: MethodId::PRACTICAL.to_vec(),
            kurtosis_mode: KurtosisMode::Standard,
            rule: QuadratureRule::default(),
            timing: true,
            loglik_floor: DEFAULT_LOGLIK_FLOOR,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub variable: String,
    pub method: MethodId,
    pub repeat: usize,
    pub fold: usize,
    pub h: f64,
    pub used_fallback: Option<bool>,
    pub heldout_mean_density: f64,
    pub heldout_loglik: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub variable: String,
    pub method: MethodId,
    pub n: usize,
    /// Bandwidth selected on the full sample.
    pub h: f64,
    pub used_fallback: Option<bool>,
    pub fit_time_s: Option<f64>,
    /// Exact leave-one-out LSCV of the full-sample fit.
    pub lscv_exact: f64,
    /// Share of fold fits that took the fallback branch.
    pub fallback_rate: Option<f64>,
    pub mean_heldout_density: f64,
    pub sd_heldout_density: f64,
    pub mean_heldout_loglik: f64,
    pub sd_heldout_loglik: f64,
    /// Signed-rank p-value of the per-fold held-out density against the
    /// first reference-rule entry; empty for that entry or when the test has
    /// too few nonzero differences.
    pub wilcoxon_p_density: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Experiment2Output {
    pub summary: Vec<SummaryRecord>,
    pub folds: Vec<FoldRecord>,
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (m, 0.0);
    }
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, var.sqrt())
}

fn fit(method: MethodId, s: &Sample, ctx: &MethodContext) -> Result<crate::harness::methods::FitOutcome> {
    match run_method(method, s, None, ctx)? {
        MethodResult::Fitted(f) => Ok(f),
        MethodResult::Unavailable(msg) => Err(Error::Config(msg)),
    }
}

pub fn run_experiment2(samples: &[(String, Sample)], cfg: &RealDataConfig) -> Result<Experiment2Output> {
    if cfg.methods.iter().any(|m| m.needs_truth()) {
        return Err(Error::Config("real-data runs accept only methods that do not need the true density".into()));
    }
    if cfg.repeats == 0 || cfg.folds < 2 {
        return Err(Error::Config("need at least one repeat and two folds".into()));
    }
    let ctx = MethodContext {
        kurtosis_mode: cfg.kurtosis_mode,
        rule: cfg.rule.clone(),
        ..MethodContext::default()
    };
    let mut out = Experiment2Output::default();
    for (label, sample) in samples {
        let n = sample.len();
        if n < MIN_OBSERVATIONS.max(cfg.folds) {
            return Err(Error::InsufficientData(format!("{label}: {n} observations, need {MIN_OBSERVATIONS}")));
        }
        let splits: Vec<Vec<(Vec<usize>, Vec<usize>)>> = (0..cfg.repeats)
            .map(|r| fold_indices(n, cfg.folds, derive_seed(cfg.root_seed, label, &[r as u64])))
            .collect();

        let mut per_method: Vec<(MethodId, Vec<FoldRecord>)> = Vec::new();
        let mut summaries = Vec::new();
        for &method in &cfg.methods {
            let full = fit(method, sample, &ctx)?;
            let lscv_exact = lscv_score(sample, method.family(), full.selection.h, &ctx.rule, CvMode::ExactLoo)?;
            let mut rows = Vec::with_capacity(cfg.repeats * cfg.folds);
            for (r, split) in splits.iter().enumerate() {
                for (k, (train, test)) in split.iter().enumerate() {
                    let f = fit(method, &sample.select(train), &ctx)?;
                    let held = sample.select(test);
                    rows.push(FoldRecord {
                        variable: label.clone(),
                        method,
                        repeat: r,
                        fold: k,
                        h: f.selection.h,
                        used_fallback: (method == MethodId::BetaRef).then_some(f.selection.used_fallback),
                        heldout_mean_density: heldout_mean_density(&f.model, &held),
                        heldout_loglik: heldout_log_likelihood(&f.model, &held, cfg.loglik_floor),
                    });
                }
            }
            let dens: Vec<f64> = rows.iter().map(|r| r.heldout_mean_density).collect();
            let ll: Vec<f64> = rows.iter().map(|r| r.heldout_loglik).collect();
            let (md, sdd) = mean_sd(&dens);
            let (ml, sdl) = mean_sd(&ll);
            let fallback_rate = (method == MethodId::BetaRef).then(|| {
                rows.iter().filter(|r| r.used_fallback == Some(true)).count() as f64 / rows.len() as f64
            });
            summaries.push(SummaryRecord {
                variable: label.clone(),
                method,
                n,
                h: full.selection.h,
                used_fallback: (method == MethodId::BetaRef).then_some(full.selection.used_fallback),
                fit_time_s: cfg.timing.then_some(full.fit_time_s),
                lscv_exact,
                fallback_rate,
                mean_heldout_density: md,
                sd_heldout_density: sdd,
                mean_heldout_loglik: ml,
                sd_heldout_loglik: sdl,
                wilcoxon_p_density: None,
            });
            per_method.push((method, rows));
        }

        if let Some(ref_idx) = per_method.iter().position(|(m, _)| *m == MethodId::BetaRef) {
            let reference = &per_method[ref_idx].1;
            for (i, (summary, (_, rows))) in summaries.iter_mut().zip(&per_method).enumerate() {
                if i == ref_idx {
                    continue;
                }
                let pairs: Vec<(f64, f64)> = rows
                    .iter()
                    .zip(reference)
                    .map(|(a, b)| (a.heldout_mean_density, b.heldout_mean_density))
                    .collect();
                summary.wilcoxon_p_density = wilcoxon_signed_rank(&pairs).ok().map(|t| t.p_value);
            }
        }
        out.summary.extend(summaries);
        out.folds.extend(per_method.into_iter().flat_map(|(_, rows)| rows));
    }
    Ok(out)
}

fn write_csv<W: Write, T: Serialize>(header: &[&str], rows: &[T], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `summary.csv` and `folds.csv` into `dir`.
pub fn write_outputs(output: &Experiment2Output, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_csv(&SUMMARY_HEADER, &output.summary, std::fs::File::create(dir.join("summary.csv"))?)?;
    write_csv(&FOLD_HEADER, &output.folds, std::fs::File::create(dir.join("folds.csv"))?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DistributionSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quick() -> RealDataConfig {
        RealDataConfig {
            repeats: 2,
            folds: 5,
            methods: vec![MethodId::BetaRef, MethodId::ReflectSilverman, MethodId::LogitSilverman],
            rule: QuadratureRule::composite(8, 16).unwrap(),
            timing: false,
            ..RealDataConfig::default()
        }
    }

    #[test]
    fn shapes_and_fallback() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let nice = DistributionSpec::beta(5.0, 5.0).sample(&mut rng, 300);
        let j = DistributionSpec::beta(0.8, 2.5).sample(&mut rng, 300);
        let out = run_experiment2(&[("nice".into(), nice), ("j".into(), j)], &quick()).unwrap();
        assert_eq!(out.summary.len(), 6);
        assert_eq!(out.folds.len(), 2 * 3 * 10);
        let rate = |v: &str| {
            out.summary
                .iter()
                .find(|s| s.variable == v && s.method == MethodId::BetaRef)
                .unwrap()
                .fallback_rate
                .unwrap()
        };
        assert_eq!(rate("nice"), 0.0);
        assert_eq!(rate("j"), 1.0);
        for s in &out.summary {
            assert_eq!(s.wilcoxon_p_density.is_none(), s.method == MethodId::BetaRef);
        }
        let dir = tempfile::tempdir().unwrap();
        write_outputs(&out, dir.path()).unwrap();
        let folds = std::fs::read_to_string(dir.path().join("folds.csv")).unwrap();
        assert!(folds.starts_with(&FOLD_HEADER.join(",")));
        assert_eq!(folds.lines().count(), 61);
    }

    #[test]
    fn identical_methods_are_not_fatal() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let s = DistributionSpec::beta(2.0, 2.0).sample(&mut rng, 40);
        let cfg = RealDataConfig {
            methods: vec![MethodId::BetaRef, MethodId::BetaRef],
            ..quick()
        };
        let out = run_experiment2(&[("x".into(), s)], &cfg).unwrap();
        assert_eq!(out.summary.len(), 2);
        // all per-fold differences are zero, so the test is skipped
        assert!(out.summary[1].wilcoxon_p_density.is_none());
    }

    #[test]
    fn rejects_small_or_oracle_inputs() {
        let s = Sample::new(vec![0.1, 0.2, 0.3, 0.4, 0.5]).unwrap();
        assert!(run_experiment2(&[("x".into(), s.clone())], &quick()).is_err());
        let cfg = RealDataConfig {
            methods: vec![MethodId::BetaOracle],
            ..quick()
        };
        assert!(run_experiment2(&[("x".into(), s)], &cfg).is_err());
    }
}
