//! Log-space special functions.
//!
//! Every gamma-function product in the crate is assembled from [`log_gamma`]
//! terms and exponentiated once at the end.

// Log-space Mul and Div add and subtract logs; reference constants keep all printed digits.
#![allow(clippy::suspicious_arithmetic_impl, clippy::excessive_precision)]

use std::f64::consts::PI;
use std::ops::{Div, Mul};

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Below this the Stirling series is reached by upward recurrence.
const STIRLING_MIN: f64 = 10.0;

/// `B_2k / (2k (2k-1))` for k = 1..8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Riemann zeta at k = 2..=60, for the Taylor series of ln Γ(1 + x).
const ZETA: [f64; 59] = [
    1.644934066848226436,
    1.202056903159594285,
    1.082323233711138192,
    1.036927755143369926,
    1.01734306198444914,
    1.008349277381922827,
    1.004077356197944339,
    1.002008392826082214,
    1.000994575127818085,
    1.000494188604119465,
    1.000246086553308048,
    1.000122713347578489,
    1.000061248135058705,
    1.00003058823630702,
    1.000015282259408652,
    1.0000076371976379,
    1.000003817293265,
    1.000001908212716554,
    1.000000953962033873,
    1.000000476932986788,
    1.000000238450502728,
    1.000000119219925965,
    1.000000059608189051,
    1.000000029803503515,
    1.000000014901554828,
    1.00000000745071179,
    1.000000003725334025,
    1.000000001862659724,
    1.000000000931327432,
    1.000000000465662907,
    1.000000000232831183,
    1.000000000116415502,
    1.000000000058207721,
    1.00000000002910385,
    1.000000000014551922,
    1.00000000000727596,
    1.00000000000363798,
    1.00000000000181899,
    1.000000000000909495,
    1.000000000000454747,
    1.000000000000227374,
    1.000000000000113687,
    1.000000000000056843,
    1.000000000000028422,
    1.000000000000014211,
    1.000000000000007105,
    1.000000000000003553,
    1.000000000000001776,
    1.000000000000000888,
    1.000000000000000444,
    1.000000000000000222,
    1.000000000000000111,
    1.000000000000000056,
    1.000000000000000028,
    1.000000000000000014,
    1.000000000000000007,
    1.000000000000000003,
    1.000000000000000002,
    1.000000000000000001,
];

/// Natural logarithm of a nonnegative quantity; `-inf` encodes zero.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogValue(f64);

impl LogValue {
    pub const ZERO: LogValue = LogValue(f64::NEG_INFINITY);
    pub const ONE: LogValue = LogValue(0.0);

    pub fn from_ln(ln: f64) -> Self {
        LogValue(ln)
    }

    /// Panics in debug builds on negative input.
    pub fn new(x: f64) -> Self {
        debug_assert!(x >= 0.0, "LogValue::new({x})");
        LogValue(x.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn exp(self) -> f64 {
        self.0.exp()
    }

    pub fn powf(self, e: f64) -> Self {
        if self.0 == f64::NEG_INFINITY {
            return if e == 0.0 { Self::ONE } else { Self::ZERO };
        }
        LogValue(self.0 * e)
    }
}

impl Mul for LogValue {
    type Output = LogValue;
    fn mul(self, rhs: LogValue) -> LogValue {
        LogValue(self.0 + rhs.0)
    }
}

impl Div for LogValue {
    type Output = LogValue;
    fn div(self, rhs: LogValue) -> LogValue {
        LogValue(self.0 - rhs.0)
    }
}

/// `ln Γ(z)` for `z > 0`.
pub fn log_gamma(z: f64) -> Result<f64> {
    if !(z > 0.0) || z.is_infinite() {
        return Err(Error::domain("log_gamma", format!("z = {z} is not a finite positive number")));
    }
    Ok(ln_gamma(z))
}

/// Unchecked core of [`log_gamma`]; NaN for nonpositive input.
pub(crate) fn ln_gamma(z: f64) -> f64 {
    if !(z > 0.0) {
        return f64::NAN;
    }
    if z < 0.5 {
        // ln Γ(z) = ln Γ(1 + z) - ln z
        ln_gamma_1p_series(z) - z.ln()
    } else if z <= 1.5 {
        ln_gamma_1p_series(z - 1.0)
    } else if z <= 2.5 {
        let x = z - 2.0;
        x.ln_1p() + ln_gamma_1p_series(x)
    } else if z < STIRLING_MIN {
        let mut shifted = z;
        let mut prod = 1.0;
        while shifted < STIRLING_MIN {
            prod *= shifted;
            shifted += 1.0;
        }
        stirling(shifted) - prod.ln()
    } else {
        stirling(z)
    }
}

/// ln Γ(1 + x) for |x| <= 0.5 via -γx + Σ ζ(k)(-x)^k / k.
fn ln_gamma_1p_series(x: f64) -> f64 {
    let y = -x;
    let mut acc = 0.0;
    for (i, zeta) in ZETA.iter().enumerate().rev() {
        let k = (i + 2) as f64;
        acc = acc * y + zeta / k;
    }
    -EULER_GAMMA * x + acc * y * y
}

fn stirling(z: f64) -> f64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    for c in STIRLING.iter().rev() {
        series = series * inv2 + c;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + series * inv
}

/// `ln B(a, b) = ln Γ(a) + ln Γ(b) - ln Γ(a + b)`.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || a.is_infinite() || b.is_infinite() {
        return Err(Error::domain("log_beta", format!("({a}, {b}) must both be positive")));
    }
    Ok(ln_beta(a, b))
}

pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// `c * ln(v)` with the convention `0 * ln 0 = 0`.
#[inline]
pub(crate) fn scaled_ln(c: f64, ln_v: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * ln_v
    }
}

/// Log density of Beta(a, b) at `t`; `-inf` where the density vanishes.
pub fn beta_log_pdf(t: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain("beta_log_pdf", format!("t = {t} is outside [0, 1]")));
    }
    let lb = log_beta(a, b)?;
    Ok(scaled_ln(a - 1.0, t.ln()) + scaled_ln(b - 1.0, (-t).ln_1p()) - lb)
}

/// Standard normal density.
#[inline]
pub(crate) fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF.
pub(crate) fn std_normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}
