//! Bandwidth selectors for the beta kernel and the Gaussian baselines.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::kernels::{Family, Sample, F2_MAX_BANDWIDTH};
use crate::metrics::{lscv_score, CvMode};
use crate::quadrature::QuadratureRule;
use crate::special::ln_gamma;

/// Upper end of the default LSCV bracket for the boundary beta kernel.
pub const F2_BRACKET_HI: f64 = 0.24;

/// Number of log-spaced grid points scanned before golden-section search.
pub const SEARCH_GRID: usize = 20;

/// Final bracket width of the search, measured in ln h.
pub const SEARCH_REL_TOL: f64 = 1e-3;

/// Shape parameters of a reference beta density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub a: f64,
    pub b: f64,
}

impl BetaParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::domain("BetaParams::new", format!("need a, b > 0 (got {a}, {b})")));
        }
        Ok(BetaParams { a, b })
    }

    /// Both shapes exceed 3/2, so the reference rule applies.
    pub fn admits_reference_rule(&self) -> bool {
        self.a > 1.5 && self.b > 1.5
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub mean: f64,
    /// Sample variance with the n - 1 divisor.
    pub variance: f64,
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MomEstimate {
    Feasible(BetaParams),
    /// The sample variance is at least x̄(1 - x̄); no beta law has these moments.
    Infeasible(MomentSummary),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KurtosisMode {
    /// The usual beta excess kurtosis, built on (a - b)².
    #[default]
    Standard,
    /// Replaces (a - b)² by (a + b)², kept for comparison with published tables.
    SumSquared,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionMethod {
    ReferenceRule,
    FallbackHeuristic,
    Silverman,
    #[serde(rename = "LSCV")]
    Lscv,
    OracleMISE,
    OracleISE,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandwidthSelection {
    pub h: f64,
    pub method: SelectionMethod,
    pub used_fallback: bool,
    pub params: Option<BetaParams>,
    pub scaling_constant: Option<f64>,
}

impl BandwidthSelection {
    fn plain(h: f64, method: SelectionMethod) -> Self {
        BandwidthSelection {
            h,
            method,
            used_fallback: false,
            params: None,
            scaling_constant: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CentralMoments {
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

pub fn moment_summary(s: &Sample) -> Result<MomentSummary> {
    if s.len() < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 observations (got {})", s.len())));
    }
    let variance = s.variance();
    if !(variance > 0.0) || s.values().iter().all(|v| *v == s.values()[0]) {
        return Err(Error::DegenerateSample("all observations are equal".into()));
    }
    Ok(MomentSummary {
        mean: s.mean(),
        variance,
        n: s.len(),
    })
}

/// Method-of-moments beta fit.
pub fn mom_estimate(s: &Sample) -> Result<MomEstimate> {
    Ok(mom_from_moments(moment_summary(s)?))
}

pub fn mom_from_moments(m: MomentSummary) -> MomEstimate {
    let spread = m.mean * (1.0 - m.mean);
    if !(m.variance < spread) || !(m.mean > 0.0 && m.mean < 1.0) {
        return MomEstimate::Infeasible(m);
    }
    let factor = spread / m.variance - 1.0;
    MomEstimate::Feasible(BetaParams {
        a: m.mean * factor,
        b: (1.0 - m.mean) * factor,
    })
}

fn ln_pos(v: f64, what: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v.ln())
    } else {
        Err(Error::Numerical(format!("{what} = {v} is not positive")))
    }
}

/// ∫ f(x) / √(x(1-x)) dx for f = Beta(a, b), valid for a, b > 1/2.
pub fn i1_closed(p: BetaParams) -> Result<f64> {
    let BetaParams { a, b } = p;
    if !(a > 0.5 && b > 0.5) {
        return Err(Error::domain("i1_closed", format!("need a, b > 1/2 (got {a}, {b})")));
    }
    let ln = (a + b - 1.0).ln() + ln_gamma(a - 0.5) + ln_gamma(b - 0.5) - ln_gamma(a) - ln_gamma(b);
    Ok(ln.exp())
}

/// ∫ (x(1-x) f''(x))² dx for f = Beta(a, b), valid for a, b > 3/2.
pub fn i2_closed(p: BetaParams) -> Result<f64> {
    let BetaParams { a, b } = p;
    if !(a > 1.5 && b > 1.5) {
        return Err(Error::domain("i2_closed", format!("need a, b > 3/2 (got {a}, {b})")));
    }
    let poly = a * (3.0 * b - 4.0) - 4.0 * b + 6.0;
    let s = 2.0 * a + 2.0 * b;
    let ln = (a - 1.0).ln() + (b - 1.0).ln() + ln_pos(poly, "a(3b-4)-4b+6")?
        + ln_gamma(2.0 * a - 3.0)
        + ln_gamma(2.0 * b - 3.0)
        + 2.0 * ln_gamma(a + b)
        - (s - 5.0).ln()
        - (s - 3.0).ln()
        - 2.0 * ln_gamma(a)
        - 2.0 * ln_gamma(b)
        - ln_gamma(s - 6.0);
    Ok(ln.exp())
}

/// Beta reference rule in its simplified three-gamma form.
pub fn h_ref(p: BetaParams, n: usize) -> Result<f64> {
    let BetaParams { a, b } = p;
    if !(a > 1.5 && b > 1.5) {
        return Err(Error::domain("h_ref", format!("need a, b > 3/2 (got {a}, {b})")));
    }
    if n == 0 {
        return Err(Error::domain("h_ref", "n must be positive"));
    }
    let s = a + b;
    let poly = a * (3.0 * b - 4.0) - 4.0 * b + 6.0;
    let inner = 0.5 * PI.ln() - (n as f64).ln()
        + ln_pos(2.0 * a - 3.0, "2a-3")?
        + ln_pos(2.0 * b - 3.0, "2b-3")?
        + (5.0 - 2.0 * s) * LN_2
        + ln_pos(2.0 * s - 5.0, "2a+2b-5")?
        + ln_pos(2.0 * s - 3.0, "2a+2b-3")?
        + ln_gamma(2.0 * (s - 3.0))
        - ln_pos(poly, "a(3b-4)-4b+6")?
        - ln_gamma(s - 1.0)
        - ln_gamma(s);
    let h = (0.4 * inner).exp();
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Numerical(format!("reference bandwidth evaluated to {h}")));
    }
    Ok(h)
}

/// The same rule assembled from the two integrals.
pub fn h_ref_composed(p: BetaParams, n: usize) -> Result<f64> {
    let ratio = i1_closed(p)? / i2_closed(p)?;
    Ok((ratio / (2.0 * n as f64 * PI.sqrt())).powf(0.4))
}

pub fn beta_central_moments(p: BetaParams, mode: KurtosisMode) -> CentralMoments {
    let BetaParams { a, b } = p;
    let s = a + b;
    let variance = a * b / (s * s * (s + 1.0));
    let skewness = 2.0 * (b - a) * (s + 1.0).sqrt() / ((s + 2.0) * (a * b).sqrt());
    let sq = match mode {
        KurtosisMode::Standard => (a - b) * (a - b),
        KurtosisMode::SumSquared => s * s,
    };
    let excess_kurtosis = 6.0 * (sq * (s + 1.0) - a * b * (s + 2.0)) / (a * b * (s + 2.0) * (s + 3.0));
    CentralMoments {
        variance,
        skewness,
        excess_kurtosis,
    }
}

/// Shape-penalized scale C(a, b) of the fallback rule.
pub fn heuristic_scaling(p: BetaParams, mode: KurtosisMode) -> f64 {
    let m = beta_central_moments(p, mode);
    m.variance.sqrt() / (1.0 + m.skewness.abs() + m.excess_kurtosis.abs())
}

/// Rule-of-thumb selection: reference rule when the MoM fit allows it,
/// otherwise the fallback heuristic.
pub fn select_bandwidth(s: &Sample, mode: KurtosisMode) -> Result<BandwidthSelection> {
    select_from_estimate(mom_estimate(s)?, s.len(), mode)
}

pub fn select_from_estimate(est: MomEstimate, n: usize, mode: KurtosisMode) -> Result<BandwidthSelection> {
    let params = match est {
        MomEstimate::Feasible(p) if p.admits_reference_rule() => {
            return Ok(BandwidthSelection {
                h: h_ref(p, n)?,
                method: SelectionMethod::ReferenceRule,
                used_fallback: false,
                params: Some(p),
                scaling_constant: None,
            });
        }
        MomEstimate::Feasible(p) => p,
        MomEstimate::Infeasible(_) => BetaParams { a: 0.5, b: 0.5 },
    };
    let c = heuristic_scaling(params, mode);
    Ok(BandwidthSelection {
        h: c * (n as f64).powf(-0.4),
        method: SelectionMethod::FallbackHeuristic,
        used_fallback: true,
        params: Some(params),
        scaling_constant: Some(c),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleVariant {
    /// For the plain beta estimator.
    H1,
    /// For the boundary-corrected estimator.
    H2,
}

/// A rule that resolves the endpoint behaviour of the oracle integrands.
pub fn oracle_rule() -> QuadratureRule {
    QuadratureRule::graded(24, 60, 0.15).expect("valid graded rule")
}

fn divergence(e: Error) -> Error {
    match e {
        Error::Integration { node, value } => {
            Error::Divergence(format!("integrand is {value} at x = {node:e}"))
        }
        other => other,
    }
}

/// MISE-optimal bandwidth for a known density, both functionals by quadrature.
pub fn oracle_bandwidth(dist: &DistributionSpec, n: usize, variant: OracleVariant, rule: &QuadratureRule) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("oracle_bandwidth", "n must be positive"));
    }
    if !dist.has_finite_roughness() {
        return Err(Error::Divergence(format!("the curvature functional of {dist} is infinite")));
    }
    let i1 = rule
        .integrate_points(|p| dist.pdf_at(p) / (p.x * p.xc).sqrt())
        .map_err(divergence)?;
    let denom = match variant {
        OracleVariant::H2 => rule
            .integrate_points(|p| (p.x * p.xc * dist.second_derivative_at(p)).powi(2))
            .map_err(divergence)?,
        OracleVariant::H1 => {
            let bias = rule
                .integrate_points(|p| {
                    ((p.xc - p.x) * dist.first_derivative_at(p)
                        + 0.5 * p.x * p.xc * dist.second_derivative_at(p))
                    .powi(2)
                })
                .map_err(divergence)?;
            4.0 * bias
        }
    };
    if !(denom > 0.0 && denom.is_finite() && i1.is_finite()) {
        return Err(Error::Divergence(format!("oracle functionals are {i1} and {denom}")));
    }
    Ok((i1 / (2.0 * PI.sqrt() * denom)).powf(0.4) * (n as f64).powf(-0.4))
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

/// 0.9 min(σ̂, IQR/1.34) n^(-1/5). When the IQR is zero but σ̂ is not,
/// σ̂ alone is used.
pub fn silverman_bandwidth(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 observations (got {n})")));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    if !(sd > 0.0) || values.iter().all(|v| *v == values[0]) {
        return Err(Error::DegenerateSample("zero spread".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    Ok(0.9 * spread * (n as f64).powf(-0.2))
}

/// Default search interval for LSCV and ISE minimization.
pub fn default_bracket(family: Family, s: &Sample) -> Result<(f64, f64)> {
    match family {
        Family::BetaF1 | Family::BetaF2 => Ok(((0.25 / s.len() as f64).max(1e-4), F2_BRACKET_HI)),
        _ => {
            let (lo, hi) = s
                .values()
                .iter()
                .map(|&v| family.working_scale(v))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
            let range = hi - lo;
            if !(range > 0.0) {
                return Err(Error::DegenerateSample("zero range on the working scale".into()));
            }
            Ok((1e-3 * range, range))
        }
    }
}

/// Minimizes `f` over h in [lo, hi]: a log-uniform grid scan, then
/// golden-section search on ln h around the best grid point. Failed or
/// non-finite evaluations count as +∞. Returns (h, f(h)).
pub fn golden_section_log<F>(mut f: F, lo: f64, hi: f64, grid: usize, rel_tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || grid < 3 {
        return Err(Error::Config(format!("invalid search interval [{lo}, {hi}]")));
    }
    let mut eval = |lh: f64| -> f64 {
        match f(lh.exp()) {
            Ok(v) if v.is_finite() => v,
            _ => f64::INFINITY,
        }
    };
    let (llo, lhi) = (lo.ln(), hi.ln());
    let step = (lhi - llo) / (grid - 1) as f64;
    let nodes: Vec<f64> = (0..grid).map(|k| llo + k as f64 * step).collect();
    let values: Vec<f64> = nodes.iter().map(|&l| eval(l)).collect();
    let (k, &v0) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty grid");
    if !v0.is_finite() {
        return Err(Error::Optimization(format!(
            "objective is not finite anywhere on [{lo:e}, {hi:e}]"
        )));
    }
    let mut best = (nodes[k], v0);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = nodes[k.saturating_sub(1)];
    let mut b = nodes[(k + 1).min(grid - 1)];
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    for (x, v) in [(c, fc), (d, fd)] {
        if v < best.1 {
            best = (x, v);
        }
    }
    while b - a > rel_tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    Ok((best.0.exp(), best.1))
}

/// Bandwidth minimizing the LSCV score.
pub fn lscv_optimize(
    s: &Sample,
    family: Family,
    bracket: Option<(f64, f64)>,
    rule: &QuadratureRule,
    mode: CvMode,
) -> Result<BandwidthSelection> {
    let (lo, hi) = match bracket {
        Some(b) => b,
        None => default_bracket(family, s)?,
    };
    if family == Family::BetaF2 && hi >= F2_MAX_BANDWIDTH {
        return Err(Error::Config(format!("bracket end {hi} must stay below 1/4")));
    }
    let (h, _) = golden_section_log(
        |h| lscv_score(s, family, h, rule, mode),
        lo,
        hi,
        SEARCH_GRID,
        SEARCH_REL_TOL,
    )?;
    Ok(BandwidthSelection::plain(h, SelectionMethod::Lscv))
}

pub fn silverman_selection(s: &Sample, family: Family) -> Result<BandwidthSelection> {
    let values: Vec<f64> = s.values().iter().map(|&v| family.working_scale(v)).collect();
    Ok(BandwidthSelection::plain(silverman_bandwidth(&values)?, SelectionMethod::Silverman))
}

pub fn oracle_selection(dist: &DistributionSpec, n: usize, variant: OracleVariant, rule: &QuadratureRule) -> Result<BandwidthSelection> {
    Ok(BandwidthSelection::plain(
        oracle_bandwidth(dist, n, variant, rule)?,
        SelectionMethod::OracleMISE,
    ))
}
