//! Density estimators on [0, 1].
//!
//! Two beta-kernel estimators (the plain one, `BetaF1`, and the boundary
//! corrected `BetaF2`) and two Gaussian baselines that handle the boundary
//! by logit transformation or by reflection.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;
use crate::special::{ln_beta, scaled_ln};

pub const DEFAULT_CLIP_EPSILON: f64 = 1e-6;

/// Largest bandwidth for which the three boundary-kernel branches are disjoint.
pub const F2_MAX_BANDWIDTH: f64 = 0.25;

/// Observations in [0, 1], kept in the order given.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData("sample is empty".into()));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::domain(
                "Sample::new",
                format!("value #{i} = {v} is outside [0, 1]"),
            ));
        }
        Ok(Sample { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Sample variance with the n - 1 divisor; 0 for a single observation.
    pub fn variance(&self) -> f64 {
        let n = self.values.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        self.values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64
    }

    /// The sample under x ↦ 1 - x.
    pub fn reflected(&self) -> Sample {
        Sample {
            values: self.values.iter().map(|v| 1.0 - v).collect(),
        }
    }

    /// Observations at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Sample {
        Sample {
            values: indices.iter().map(|&i| self.values[i]).collect(),
        }
    }
}

impl TryFrom<Vec<f64>> for Sample {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Sample::new(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Family {
    /// Beta kernel with shapes (x/h + 1, (1 - x)/h + 1).
    BetaF1,
    /// Boundary-corrected beta kernel.
    BetaF2,
    /// Gaussian KDE of logit-transformed data; `h` lives on the logit scale.
    GaussLogit { clip_epsilon: f64 },
    /// Gaussian KDE with the data mirrored across 0 and 1.
    GaussReflect,
}

impl Family {
    pub fn gauss_logit() -> Self {
        Family::GaussLogit {
            clip_epsilon: DEFAULT_CLIP_EPSILON,
        }
    }

    pub fn is_beta(&self) -> bool {
        matches!(self, Family::BetaF1 | Family::BetaF2)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::BetaF1 => "beta-f1",
            Family::BetaF2 => "beta-f2",
            Family::GaussLogit { .. } => "gauss-logit",
            Family::GaussReflect => "gauss-reflect",
        }
    }

    /// Maps a data value onto the scale the bandwidth is measured on.
    pub fn working_scale(&self, v: f64) -> f64 {
        match *self {
            Family::GaussLogit { clip_epsilon } => logit(v.clamp(clip_epsilon, 1.0 - clip_epsilon)),
            _ => v,
        }
    }
}

/// Shape parameters of one beta kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelShape {
    pub p: f64,
    pub q: f64,
}

impl KernelShape {
    pub fn variance(&self) -> f64 {
        let s = self.p + self.q;
        self.p * self.q / (s * s * (s + 1.0))
    }
}

/// Boundary shape `2h² + 2.5 - sqrt(4h⁴ + 6h² + 2.25 - x² - x/h)` for x in [0, 2h].
pub fn rho(x: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::domain("rho", format!("bandwidth h = {h} must be positive")));
    }
    if !(0.0..=2.0 * h).contains(&x) {
        return Err(Error::domain("rho", format!("x = {x} is outside [0, 2h] for h = {h}")));
    }
    let radicand = 4.0 * h.powi(4) + 6.0 * h * h + 2.25 - x * x - x / h;
    if radicand < 0.0 {
        return Err(Error::domain("rho", format!("negative radicand {radicand} at x = {x}, h = {h}")));
    }
    Ok(rho_unchecked(x, h, radicand))
}

#[inline]
fn rho_unchecked(x: f64, h: f64, radicand: f64) -> f64 {
    if x == 0.0 {
        // the radicand is (2h² + 1.5)²
        return 1.0;
    }
    2.0 * h * h + 2.5 - radicand.sqrt()
}

#[inline]
fn rho_fast(x: f64, h: f64) -> f64 {
    rho_unchecked(x, h, 4.0 * h.powi(4) + 6.0 * h * h + 2.25 - x * x - x / h)
}

/// Shapes of the boundary kernel used by `BetaF2` at evaluation point `x`.
pub fn kernel_shape_params(x: f64, h: f64) -> Result<KernelShape> {
    if !(h > 0.0) {
        return Err(Error::domain("kernel_shape_params", format!("h = {h} must be positive")));
    }
    if h >= F2_MAX_BANDWIDTH {
        return Err(Error::Config(format!(
            "boundary beta kernel requires h < 1/4 (got {h}); the kernel branches would overlap"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain("kernel_shape_params", format!("x = {x} is outside [0, 1]")));
    }
    Ok(f2_shape(x, h))
}

#[inline]
fn f2_shape(x: f64, h: f64) -> KernelShape {
    if x < 2.0 * h {
        KernelShape {
            p: rho_fast(x, h),
            q: (1.0 - x) / h,
        }
    } else if x > 1.0 - 2.0 * h {
        KernelShape {
            p: x / h,
            q: rho_fast(1.0 - x, h),
        }
    } else {
        KernelShape {
            p: x / h,
            q: (1.0 - x) / h,
        }
    }
}

#[inline]
fn f1_shape(x: f64, h: f64) -> KernelShape {
    KernelShape {
        p: x / h + 1.0,
        q: (1.0 - x) / h + 1.0,
    }
}

#[inline]
pub(crate) fn logit(v: f64) -> f64 {
    (v / (1.0 - v)).ln()
}

#[inline]
fn gauss(u: f64, h: f64) -> f64 {
    let z = u / h;
    (-0.5 * z * z).exp() / (h * (2.0 * PI).sqrt())
}

#[derive(Clone, Debug)]
enum Prepared {
    Beta { ln_t: Vec<f64>, ln_1mt: Vec<f64> },
    Logit { y: Vec<f64> },
    Reflect,
}

/// A fitted estimator. Immutable; evaluation is pure.
#[derive(Clone, Debug)]
pub struct DensityModel {
    family: Family,
    data: Sample,
    h: f64,
    normalization: Option<f64>,
    prepared: Prepared,
}

impl DensityModel {
    pub fn fit(family: Family, data: Sample, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Config(format!("bandwidth must be positive and finite (got {h})")));
        }
        let prepared = match family {
            Family::BetaF2 if h >= F2_MAX_BANDWIDTH => {
                return Err(Error::Config(format!(
                    "the boundary beta kernel requires h < 1/4 (got {h})"
                )))
            }
            Family::BetaF1 | Family::BetaF2 => Prepared::Beta {
                ln_t: data.values().iter().map(|t| t.ln()).collect(),
                ln_1mt: data.values().iter().map(|t| (-t).ln_1p()).collect(),
            },
            Family::GaussLogit { clip_epsilon } => {
                if !(clip_epsilon > 0.0 && clip_epsilon <= 0.01) {
                    return Err(Error::Config(format!(
                        "clip_epsilon must be in (0, 0.01] (got {clip_epsilon})"
                    )));
                }
                Prepared::Logit {
                    y: data.values().iter().map(|&v| family.working_scale(v)).collect(),
                }
            }
            Family::GaussReflect => Prepared::Reflect,
        };
        Ok(DensityModel {
            family,
            data,
            h,
            normalization: None,
            prepared,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn bandwidth(&self) -> f64 {
        self.h
    }

    pub fn data(&self) -> &Sample {
        &self.data
    }

    pub fn normalization(&self) -> Option<f64> {
        self.normalization
    }

    /// Density at `x`; zero outside [0, 1].
    pub fn evaluate(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        let raw = self.kernel_sum(x, None) / self.data.len() as f64;
        match self.normalization {
            Some(c) => raw / c,
            None => raw,
        }
    }

    pub fn evaluate_grid(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.evaluate(x)).collect()
    }

    /// Leave-one-out estimate at observation `i`, from the other n - 1 points.
    pub fn leave_one_out(&self, i: usize) -> f64 {
        let n = self.data.len();
        debug_assert!(n >= 2);
        let x = self.data.values()[i];
        let raw = self.kernel_sum(x, Some(i)) / (n - 1) as f64;
        match self.normalization {
            Some(c) => raw / c,
            None => raw,
        }
    }

    /// Sum of kernel contributions at `x`, optionally skipping one observation.
    fn kernel_sum(&self, x: f64, skip: Option<usize>) -> f64 {
        let skip = skip.unwrap_or(usize::MAX);
        match &self.prepared {
            Prepared::Beta { ln_t, ln_1mt } => {
                let shape = match self.family {
                    Family::BetaF1 => f1_shape(x, self.h),
                    _ => f2_shape(x, self.h),
                };
                let (pm1, qm1) = (shape.p - 1.0, shape.q - 1.0);
                let lb = ln_beta(shape.p, shape.q);
                let mut sum = 0.0;
                for (i, (lt, l1)) in ln_t.iter().zip(ln_1mt).enumerate() {
                    if i != skip {
                        sum += (scaled_ln(pm1, *lt) + scaled_ln(qm1, *l1) - lb).exp();
                    }
                }
                sum
            }
            Prepared::Logit { y } => {
                let eps = match self.family {
                    Family::GaussLogit { clip_epsilon } => clip_epsilon,
                    _ => unreachable!(),
                };
                let xc = x.clamp(eps, 1.0 - eps);
                let lx = logit(xc);
                let jac = xc * (1.0 - xc);
                let mut sum = 0.0;
                for (i, yi) in y.iter().enumerate() {
                    if i != skip {
                        sum += gauss(lx - yi, self.h);
                    }
                }
                sum / jac
            }
            Prepared::Reflect => {
                let mut sum = 0.0;
                for (i, xi) in self.data.values().iter().enumerate() {
                    if i != skip {
                        sum += gauss(x - xi, self.h) + gauss(x + xi, self.h) + gauss(2.0 - x - xi, self.h);
                    }
                }
                sum
            }
        }
    }

    /// ∫₀¹ of the model as currently normalized.
    pub fn total_mass(&self, rule: &QuadratureRule) -> Result<f64> {
        rule.integrate(|x| self.evaluate(x))
    }

    /// Copy rescaled to unit mass. Idempotent: the divisor is always the
    /// mass of the raw estimate.
    pub fn normalize(&self, rule: &QuadratureRule) -> Result<DensityModel> {
        let mut raw = self.clone();
        raw.normalization = None;
        let mass = raw.total_mass(rule)?;
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::Numerical(format!("cannot normalize a model with mass {mass}")));
        }
        raw.normalization = Some(mass);
        Ok(raw)
    }
}
