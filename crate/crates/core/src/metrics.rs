//! Scores for fitted models and the paired tests used to compare methods.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::kernels::{DensityModel, Family, Sample};
use crate::quadrature::QuadratureRule;
use crate::special::std_normal_cdf;

pub const DEFAULT_LOGLIK_FLOOR: f64 = 1e-300;

/// Smallest number of nonzero differences accepted by the signed-rank test.
pub const WILCOXON_MIN_PAIRS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CvMode {
    ExactLoo,
    /// Folds come from a shuffle seeded with `seed`.
    KFold { k: usize, seed: u64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub ise: Option<f64>,
    pub lscv: f64,
    pub mean_loglik: Option<f64>,
    pub mean_heldout_density: Option<f64>,
    pub mass_error: Option<f64>,
    pub wall_time_seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassError {
    /// |∫f̂ - 1|.
    pub observed: f64,
    /// |h/2 (f(0) + f(1) - 2)| when the true boundary values are known.
    pub predicted_first_order: Option<f64>,
}

fn as_divergence(e: Error) -> Error {
    match e {
        Error::Integration { node, value } => Error::Divergence(format!("squared error is {value} at x = {node:e}")),
        other => other,
    }
}

/// ∫₀¹ (f̂ - f)².
pub fn ise<F, G>(model_eval: F, true_pdf: G, rule: &QuadratureRule) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    rule.integrate(|x| (model_eval(x) - true_pdf(x)).powi(2))
        .map_err(as_divergence)
}

pub fn model_ise(model: &DensityModel, truth: &DistributionSpec, rule: &QuadratureRule) -> Result<f64> {
    rule.integrate_points(|p| (model.evaluate(p.x) - truth.pdf_at(p)).powi(2))
        .map_err(as_divergence)
}

/// ∫f̂² - (2/n) Σ f̂₋ᵢ(xᵢ).
pub fn lscv_score(s: &Sample, family: Family, h: f64, rule: &QuadratureRule, mode: CvMode) -> Result<f64> {
    let n = s.len();
    let model = DensityModel::fit(family, s.clone(), h)?;
    let square = rule.integrate(|x| model.evaluate(x).powi(2))?;
    let cross = match mode {
        CvMode::ExactLoo => {
            if n < 2 {
                return Err(Error::InsufficientData("LSCV needs at least 2 observations".into()));
            }
            (0..n).map(|i| model.leave_one_out(i)).sum::<f64>()
        }
        CvMode::KFold { k, seed } => {
            if k < 2 || n < k {
                return Err(Error::InsufficientData(format!("{k}-fold LSCV with n = {n}")));
            }
            let mut total = 0.0;
            for (train, test) in fold_indices(n, k, seed) {
                let fold_model = DensityModel::fit(family, s.select(&train), h)?;
                total += test.iter().map(|&i| fold_model.evaluate(s.values()[i])).sum::<f64>();
            }
            total
        }
    };
    let score = square - 2.0 * cross / n as f64;
    if !score.is_finite() {
        return Err(Error::Numerical(format!("LSCV score at h = {h} is {score}")));
    }
    Ok(score)
}

/// (training, held-out) index sets of a seeded k-fold split. Position `j` of
/// the shuffled order goes to fold `j mod k`.
pub fn fold_indices(n: usize, k: usize, seed: u64) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold_of = vec![0; n];
    for (j, &i) in order.iter().enumerate() {
        fold_of[i] = j % k;
    }
    (0..k)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| fold_of[i] == f);
            (train, test)
        })
        .collect()
}

/// Mean of f̂ over held-out points; higher is better.
pub fn heldout_mean_density(model: &DensityModel, heldout: &Sample) -> f64 {
    heldout.values().iter().map(|&z| model.evaluate(z)).sum::<f64>() / heldout.len() as f64
}

pub fn heldout_log_likelihood(model: &DensityModel, heldout: &Sample, floor: f64) -> f64 {
    heldout
        .values()
        .iter()
        .map(|&z| model.evaluate(z).max(floor).ln())
        .sum::<f64>()
        / heldout.len() as f64
}

pub fn mass_error(model: &DensityModel, rule: &QuadratureRule, truth: Option<&DistributionSpec>) -> Result<MassError> {
    let observed = (model.total_mass(rule)? - 1.0).abs();
    let predicted_first_order = truth
        .and_then(|d| d.boundary_values())
        .map(|(f0, f1)| (0.5 * model.bandwidth() * (f0 + f1 - 2.0)).abs());
    Ok(MassError {
        observed,
        predicted_first_order,
    })
}

/// Two-sided signed-rank test on the differences x - y.
///
/// Zero differences are dropped and tied magnitudes share their average
/// rank. The p-value comes from the normal approximation with tie-corrected
/// variance and a 0.5 continuity correction. The statistic is min(W+, W-).
pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<TestResult> {
    let diffs: Vec<f64> = pairs.iter().map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    wilcoxon_from_differences(&diffs)
}

pub fn wilcoxon_from_differences(diffs: &[f64]) -> Result<TestResult> {
    let mut d: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    let n = d.len();
    if n < WILCOXON_MIN_PAIRS {
        return Err(Error::InsufficientData(format!(
            "signed-rank test needs {WILCOXON_MIN_PAIRS} nonzero differences (got {n})"
        )));
    }
    d.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut w_plus = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && d[j + 1].abs() == d[i].abs() {
            j += 1;
        }
        let rank = (i + j + 2) as f64 / 2.0;
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        w_plus += rank * d[i..=j].iter().filter(|v| **v > 0.0).count() as f64;
        i = j + 1;
    }
    let nf = n as f64;
    let total = nf * (nf + 1.0) / 2.0;
    let mean = total / 2.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let p_value = (2.0 * std_normal_cdf(-z)).min(1.0);
    Ok(TestResult {
        statistic: w_plus.min(total - w_plus),
        p_value,
    })
}

/// Two-sided paired t-test on x - y.
pub fn paired_t_test(pairs: &[(f64, f64)]) -> Result<TestResult> {
    let d: Vec<f64> = pairs.iter().map(|(x, y)| x - y).collect();
    let n = d.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("paired t-test needs 2 pairs (got {n})")));
    }
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if !(var > 0.0) {
        return Err(Error::DegenerateSample("differences have zero variance".into()));
    }
    let t = mean / (var / n as f64).sqrt();
    Ok(TestResult {
        statistic: t,
        p_value: t_two_sided_p(t, (n - 1) as f64)?,
    })
}

pub fn t_two_sided_p(t: f64, df: f64) -> Result<f64> {
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Numerical(e.to_string()))?;
    Ok((2.0 * dist.cdf(-t.abs())).min(1.0))
}
