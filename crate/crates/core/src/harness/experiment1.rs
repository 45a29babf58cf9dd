//! Monte Carlo comparison of the ten methods on known densities.

use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::methods::{run_method, MethodContext, MethodId, MethodResult};
use crate::harness::seeds::{derive_seed, trial_seed};
use crate::metrics::{lscv_score, mass_error, model_ise, CvMode};

pub const CSV_HEADER: [&str; 11] = [
    "distribution",
    "method",
    "n",
    "trial",
    "seed",
    "h",
    "used_fallback",
    "fit_time_s",
    "lscv_kfold",
    "ise",
    "mass_err",
];

/// One (distribution, method, n, trial) observation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub distribution: String,
    pub method: MethodId,
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub h: f64,
    /// Only meaningful for the reference rule.
    pub used_fallback: Option<bool>,
    pub fit_time_s: Option<f64>,
    pub lscv_kfold: Option<f64>,
    pub ise: Option<f64>,
    pub mass_err: Option<f64>,
}

/// Runs the study and returns records ordered by (distribution, method, n, trial).
pub fn run_experiment1(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    run_experiment1_with_progress(cfg, |_, _| {})
}

/// As [`run_experiment1`], calling `progress(done, total)` after each trial.
pub fn run_experiment1_with_progress<P: FnMut(usize, usize)>(
    cfg: &ExperimentConfig,
    mut progress: P,
) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let ctx = MethodContext {
        kurtosis_mode: cfg.kurtosis_mode,
        rule: cfg.rule()?,
        ..MethodContext::default()
    };
    let total = cfg.distributions.len() * cfg.sample_sizes.len() * cfg.trials;
    let mut done = 0;
    // Keyed so the final sort gives (distribution, method, n, trial) order.
    let mut keyed: Vec<((usize, usize, usize, usize), TrialRecord)> = Vec::new();
    for (di, dist) in cfg.distributions.iter().enumerate() {
        let finite = dist.spec.has_finite_roughness();
        for (ni, &n) in cfg.sample_sizes.iter().enumerate() {
            for trial in 0..cfg.trials {
                let seed = trial_seed(cfg.root_seed, &dist.label, n, trial);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let sample = dist.spec.sample(&mut rng, n);
                let fold_seed = derive_seed(seed, "folds", &[]);
                for (mi, &method) in cfg.methods.iter().enumerate() {
                    let out = match run_method(method, &sample, Some(&dist.spec), &ctx) {
                        Ok(MethodResult::Fitted(out)) => out,
                        // Unavailable or failed fits are absent rows, not aborts.
                        Ok(MethodResult::Unavailable(_)) | Err(_) => continue,
                    };
                    let h = out.selection.h;
                    let lscv_kfold = if n >= cfg.lscv_folds {
                        lscv_score(
                            &sample,
                            method.family(),
                            h,
                            &ctx.rule,
                            CvMode::KFold {
                                k: cfg.lscv_folds,
                                seed: fold_seed,
                            },
                        )
                        .ok()
                    } else {
                        None
                    };
                    let ise = if finite {
                        model_ise(&out.model, &dist.spec, &ctx.rule).ok()
                    } else {
                        None
                    };
                    let mass_err = mass_error(&out.model, &ctx.rule, None).ok().map(|m| m.observed);
                    let record = TrialRecord {
                        distribution: dist.label.clone(),
                        method,
                        n,
                        trial,
                        seed,
                        h,
                        used_fallback: (method == MethodId::BetaRef).then_some(out.selection.used_fallback),
                        fit_time_s: cfg.timing.then_some(out.fit_time_s),
                        lscv_kfold,
                        ise,
                        mass_err,
                    };
                    keyed.push(((di, mi, ni, trial), record));
                }
                done += 1;
                progress(done, total);
            }
        }
    }
    keyed.sort_by_key(|(k, _)| *k);
    Ok(keyed.into_iter().map(|(_, r)| r).collect())
}

pub fn write_records<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records_to(records: &[TrialRecord], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_records(records, std::fs::File::create(path)?)
}

pub fn read_records(path: &Path) -> Result<Vec<TrialRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for rec in r.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}
