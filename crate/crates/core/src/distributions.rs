//! Test densities on [0, 1] with analytic derivatives and samplers.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::Sample;
use crate::quadrature::UnitPoint;
use crate::special::{ln_beta, scaled_ln, std_normal_cdf, std_normal_pdf};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionSpec {
    Beta {
        a: f64,
        b: f64,
    },
    /// Parent normal N(mu, sigma²) truncated to [0, 1].
    TruncNormal {
        mu: f64,
        sigma: f64,
    },
    Mixture {
        weights: Vec<f64>,
        components: Vec<DistributionSpec>,
    },
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::Beta { a, b } => write!(f, "B({a},{b})"),
            DistributionSpec::TruncNormal { mu, sigma } => write!(f, "NT({mu},{sigma})"),
            DistributionSpec::Mixture { weights, components } => {
                write!(f, "Mix(")?;
                for (i, (w, c)) in weights.iter().zip(components).enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    write!(f, "{w}*{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl DistributionSpec {
    pub fn beta(a: f64, b: f64) -> Self {
        DistributionSpec::Beta { a, b }
    }

    pub fn trunc_normal(mu: f64, sigma: f64) -> Self {
        DistributionSpec::TruncNormal { mu, sigma }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DistributionSpec::Beta { a, b } => {
                if !(*a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite()) {
                    return Err(Error::Config(format!("beta parameters must be positive (got {a}, {b})")));
                }
            }
            DistributionSpec::TruncNormal { mu, sigma } => {
                if !(*sigma > 0.0 && sigma.is_finite() && mu.is_finite()) {
                    return Err(Error::Config(format!("truncated normal needs sigma > 0 (got {mu}, {sigma})")));
                }
            }
            DistributionSpec::Mixture { weights, components } => {
                if weights.is_empty() || weights.len() != components.len() {
                    return Err(Error::Config("mixture needs one weight per component".into()));
                }
                if weights.iter().any(|w| !(*w > 0.0)) {
                    return Err(Error::Config("mixture weights must be positive".into()));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::Config(format!("mixture weights sum to {total}, not 1")));
                }
                for c in components {
                    c.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Density at `x` in (0, 1).
    pub fn pdf(&self, x: f64) -> f64 {
        self.pdf_at(UnitPoint::new(x))
    }

    pub fn first_derivative(&self, x: f64) -> f64 {
        self.first_derivative_at(UnitPoint::new(x))
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        self.second_derivative_at(UnitPoint::new(x))
    }

    /// Density using the exact complement `1 - x`, for points close to 1.
    pub fn pdf_at(&self, p: UnitPoint) -> f64 {
        match self {
            DistributionSpec::Beta { a, b } => {
                (scaled_ln(a - 1.0, p.x.ln()) + scaled_ln(b - 1.0, p.xc.ln()) - ln_beta(*a, *b)).exp()
            }
            DistributionSpec::TruncNormal { mu, sigma } => {
                let z = (p.x - mu) / sigma;
                std_normal_pdf(z) / (sigma * trunc_mass(*mu, *sigma))
            }
            DistributionSpec::Mixture { weights, components } => weights
                .iter()
                .zip(components)
                .map(|(w, c)| w * c.pdf_at(p))
                .sum(),
        }
    }

    pub fn first_derivative_at(&self, p: UnitPoint) -> f64 {
        match self {
            DistributionSpec::Beta { a, b } => {
                let scale = (scaled_ln(a - 2.0, p.x.ln()) + scaled_ln(b - 2.0, p.xc.ln()) - ln_beta(*a, *b)).exp();
                scale * ((a - 1.0) * p.xc - (b - 1.0) * p.x)
            }
            DistributionSpec::TruncNormal { mu, sigma } => {
                let z = (p.x - mu) / sigma;
                -z / sigma * self.pdf_at(p)
            }
            DistributionSpec::Mixture { weights, components } => weights
                .iter()
                .zip(components)
                .map(|(w, c)| w * c.first_derivative_at(p))
                .sum(),
        }
    }

    /// f'' via the factorization C x^(a-3) (1-x)^(b-3) P(x) with P quadratic.
    pub fn second_derivative_at(&self, p: UnitPoint) -> f64 {
        match self {
            DistributionSpec::Beta { a, b } => {
                let (x, xc) = (p.x, p.xc);
                let poly = (a - 2.0) * (a - 1.0) * xc * xc - 2.0 * (a - 1.0) * (b - 1.0) * x * xc
                    + (b - 2.0) * (b - 1.0) * x * x;
                if poly == 0.0 {
                    return 0.0;
                }
                let scale = (scaled_ln(a - 3.0, x.ln()) + scaled_ln(b - 3.0, xc.ln()) - ln_beta(*a, *b)).exp();
                scale * poly
            }
            DistributionSpec::TruncNormal { mu, sigma } => {
                let z = (p.x - mu) / sigma;
                self.pdf_at(p) * (z * z - 1.0) / (sigma * sigma)
            }
            DistributionSpec::Mixture { weights, components } => weights
                .iter()
                .zip(components)
                .map(|(w, c)| w * c.second_derivative_at(p))
                .sum(),
        }
    }

    /// (f(0), f(1)) when both are finite.
    pub fn boundary_values(&self) -> Option<(f64, f64)> {
        match self {
            DistributionSpec::Beta { a, b } => {
                let end = |s: f64, other: f64| -> Option<f64> {
                    if s > 1.0 {
                        Some(0.0)
                    } else if s == 1.0 {
                        Some((-ln_beta(1.0, other)).exp())
                    } else {
                        None
                    }
                };
                Some((end(*a, *b)?, end(*b, *a)?))
            }
            DistributionSpec::TruncNormal { mu, sigma } => {
                let z = trunc_mass(*mu, *sigma);
                Some((
                    std_normal_pdf(-mu / sigma) / (sigma * z),
                    std_normal_pdf((1.0 - mu) / sigma) / (sigma * z),
                ))
            }
            DistributionSpec::Mixture { weights, components } => {
                let mut lo = 0.0;
                let mut hi = 0.0;
                for (w, c) in weights.iter().zip(components) {
                    let (l, h) = c.boundary_values()?;
                    lo += w * l;
                    hi += w * h;
                }
                Some((lo, hi))
            }
        }
    }

    /// Whether ∫ (x(1-x) f'')² is finite, i.e. the oracle bandwidth exists.
    /// For a beta density this needs both shapes above 3/2.
    pub fn has_finite_roughness(&self) -> bool {
        match self {
            DistributionSpec::Beta { a, b } => *a > 1.5 && *b > 1.5,
            DistributionSpec::TruncNormal { .. } => true,
            DistributionSpec::Mixture { components, .. } => {
                components.iter().all(|c| c.has_finite_roughness())
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            DistributionSpec::Beta { a, b } => a / (a + b),
            DistributionSpec::TruncNormal { mu, sigma } => {
                let (al, be) = (-mu / sigma, (1.0 - mu) / sigma);
                mu + sigma * (std_normal_pdf(al) - std_normal_pdf(be)) / trunc_mass(*mu, *sigma)
            }
            DistributionSpec::Mixture { weights, components } => {
                weights.iter().zip(components).map(|(w, c)| w * c.mean()).sum()
            }
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            DistributionSpec::Beta { a, b } => a * b / ((a + b) * (a + b) * (a + b + 1.0)),
            DistributionSpec::TruncNormal { mu, sigma } => {
                let (al, be) = (-mu / sigma, (1.0 - mu) / sigma);
                let z = trunc_mass(*mu, *sigma);
                let d = (std_normal_pdf(al) - std_normal_pdf(be)) / z;
                sigma * sigma * (1.0 + (al * std_normal_pdf(al) - be * std_normal_pdf(be)) / z - d * d)
            }
            DistributionSpec::Mixture { weights, components } => {
                let m = self.mean();
                weights
                    .iter()
                    .zip(components)
                    .map(|(w, c)| w * (c.variance() + c.mean() * c.mean()))
                    .sum::<f64>()
                    - m * m
            }
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            DistributionSpec::Beta { a, b } => {
                let ga: f64 = Gamma::new(*a, 1.0).expect("validated shape").sample(rng);
                let gb: f64 = Gamma::new(*b, 1.0).expect("validated shape").sample(rng);
                let s = ga + gb;
                if s > 0.0 {
                    ga / s
                } else if rng.random::<bool>() {
                    1.0
                } else {
                    0.0
                }
            }
            DistributionSpec::TruncNormal { mu, sigma } => loop {
                let z: f64 = StandardNormal.sample(rng);
                let x = mu + sigma * z;
                if (0.0..=1.0).contains(&x) {
                    break x;
                }
            },
            DistributionSpec::Mixture { weights, components } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (w, c) in weights.iter().zip(components) {
                    acc += w;
                    if u < acc {
                        return c.draw(rng);
                    }
                }
                components.last().expect("nonempty mixture").draw(rng)
            }
        }
    }

    /// `n` independent draws.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Sample {
        let values = (0..n).map(|_| self.draw(rng)).collect();
        Sample::new(values).expect("draws lie in [0, 1]")
    }
}

fn trunc_mass(mu: f64, sigma: f64) -> f64 {
    std_normal_cdf((1.0 - mu) / sigma) - std_normal_cdf(-mu / sigma)
}

/// The eight benchmark densities: four bell-shaped, three boundary-heavy and
/// one bimodal mixture.
pub fn benchmark_distributions() -> Vec<(String, DistributionSpec)> {
    let mix = DistributionSpec::Mixture {
        weights: vec![0.5, 0.5],
        components: vec![DistributionSpec::beta(10.0, 30.0), DistributionSpec::beta(30.0, 10.0)],
    };
    vec![
        ("B(5,5)".into(), DistributionSpec::beta(5.0, 5.0)),
        ("B(2,12)".into(), DistributionSpec::beta(2.0, 12.0)),
        ("NT(0.5,0.15)".into(), DistributionSpec::trunc_normal(0.5, 0.15)),
        ("NT(0.7,0.15)".into(), DistributionSpec::trunc_normal(0.7, 0.15)),
        ("B(0.5,0.5)".into(), DistributionSpec::beta(0.5, 0.5)),
        ("B(0.8,2.5)".into(), DistributionSpec::beta(0.8, 2.5)),
        ("B(1.5,1.5)".into(), DistributionSpec::beta(1.5, 1.5)),
        ("Mix(B(10,30),B(30,10))".into(), mix),
    ]
}
