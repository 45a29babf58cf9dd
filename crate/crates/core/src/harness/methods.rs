//! The ten estimator/selector combinations compared in the experiments.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bandwidth::{
    default_bracket, golden_section_log, lscv_optimize, oracle_bandwidth, select_bandwidth, silverman_selection,
    BandwidthSelection, KurtosisMode, OracleVariant, SelectionMethod, F2_BRACKET_HI, SEARCH_GRID, SEARCH_REL_TOL,
};
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::kernels::{DensityModel, Family, Sample};
use crate::metrics::{model_ise, CvMode};
use crate::quadrature::QuadratureRule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodId {
    BetaRef,
    #[serde(rename = "beta-lscv")]
    BetaLSCV,
    #[serde(rename = "beta-isemin")]
    BetaISEmin,
    BetaOracle,
    LogitSilverman,
    #[serde(rename = "logit-lscv")]
    LogitLSCV,
    #[serde(rename = "logit-isemin")]
    LogitISEmin,
    ReflectSilverman,
    #[serde(rename = "reflect-lscv")]
    ReflectLSCV,
    #[serde(rename = "reflect-isemin")]
    ReflectISEmin,
}

impl MethodId {
    pub const ALL: [MethodId; 10] = [
        MethodId::BetaRef,
        MethodId::BetaLSCV,
        MethodId::BetaISEmin,
        MethodId::BetaOracle,
        MethodId::LogitSilverman,
        MethodId::LogitLSCV,
        MethodId::LogitISEmin,
        MethodId::ReflectSilverman,
        MethodId::ReflectLSCV,
        MethodId::ReflectISEmin,
    ];

    /// Methods usable without knowing the true density.
    pub const PRACTICAL: [MethodId; 6] = [
        MethodId::BetaRef,
        MethodId::BetaLSCV,
        MethodId::LogitSilverman,
        MethodId::LogitLSCV,
        MethodId::ReflectSilverman,
        MethodId::ReflectLSCV,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodId::BetaRef => "beta-ref",
            MethodId::BetaLSCV => "beta-lscv",
            MethodId::BetaISEmin => "beta-isemin",
            MethodId::BetaOracle => "beta-oracle",
            MethodId::LogitSilverman => "logit-silverman",
            MethodId::LogitLSCV => "logit-lscv",
            MethodId::LogitISEmin => "logit-isemin",
            MethodId::ReflectSilverman => "reflect-silverman",
            MethodId::ReflectLSCV => "reflect-lscv",
            MethodId::ReflectISEmin => "reflect-isemin",
        }
    }

    pub fn family(self) -> Family {
        match self {
            MethodId::BetaRef | MethodId::BetaLSCV | MethodId::BetaISEmin | MethodId::BetaOracle => Family::BetaF2,
            MethodId::LogitSilverman | MethodId::LogitLSCV | MethodId::LogitISEmin => Family::gauss_logit(),
            MethodId::ReflectSilverman | MethodId::ReflectLSCV | MethodId::ReflectISEmin => Family::GaussReflect,
        }
    }

    pub fn needs_truth(self) -> bool {
        matches!(
            self,
            MethodId::BetaISEmin | MethodId::BetaOracle | MethodId::LogitISEmin | MethodId::ReflectISEmin
        )
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodId::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let known: Vec<&str> = MethodId::ALL.iter().map(|m| m.as_str()).collect();
                Error::Config(format!("unknown method '{s}' (expected one of {})", known.join(", ")))
            })
    }
}

/// Settings shared by every method invocation.
#[derive(Clone, Debug)]
pub struct MethodContext {
    pub kurtosis_mode: KurtosisMode,
    /// Rule for ∫f̂², ISE and mass.
    pub rule: QuadratureRule,
    /// Rule for the oracle functionals, which have endpoint singularities.
    pub oracle_rule: QuadratureRule,
}

impl Default for MethodContext {
    fn default() -> Self {
        MethodContext {
            kurtosis_mode: KurtosisMode::Standard,
            rule: QuadratureRule::default(),
            oracle_rule: crate::bandwidth::oracle_rule(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FitOutcome {
    pub model: DensityModel,
    pub selection: BandwidthSelection,
    /// Wall-clock seconds for bandwidth selection plus model construction.
    pub fit_time_s: f64,
}

#[derive(Clone, Debug)]
pub enum MethodResult {
    Fitted(FitOutcome),
    /// The method cannot be run on this input, e.g. an oracle for a density
    /// whose curvature functional diverges.
    Unavailable(String),
}

impl MethodResult {
    pub fn fitted(self) -> Option<FitOutcome> {
        match self {
            MethodResult::Fitted(f) => Some(f),
            MethodResult::Unavailable(_) => None,
        }
    }
}

/// Caps a bandwidth so the boundary kernel stays defined.
fn cap_for_family(h: f64, family: Family) -> f64 {
    if family == Family::BetaF2 {
        h.min(F2_BRACKET_HI)
    } else {
        h
    }
}

/// Selects a bandwidth and fits the model for one method.
pub fn run_method(
    method: MethodId,
    s: &Sample,
    truth: Option<&DistributionSpec>,
    ctx: &MethodContext,
) -> Result<MethodResult> {
    let family = method.family();
    let truth = if method.needs_truth() {
        match truth {
            None => return Ok(MethodResult::Unavailable(format!("{method} needs the true density"))),
            Some(d) if !d.has_finite_roughness() => {
                return Ok(MethodResult::Unavailable(format!(
                    "{method} is undefined for {d}: the oracle functionals diverge"
                )))
            }
            Some(d) => Some(d),
        }
    } else {
        None
    };

    let start = Instant::now();
    let mut selection = match method {
        MethodId::BetaRef => select_bandwidth(s, ctx.kurtosis_mode)?,
        MethodId::BetaLSCV | MethodId::LogitLSCV | MethodId::ReflectLSCV => {
            lscv_optimize(s, family, None, &ctx.rule, CvMode::ExactLoo)?
        }
        MethodId::LogitSilverman | MethodId::ReflectSilverman => silverman_selection(s, family)?,
        MethodId::BetaOracle => {
            let d = truth.expect("checked above");
            match oracle_bandwidth(d, s.len(), OracleVariant::H2, &ctx.oracle_rule) {
                Ok(h) => BandwidthSelection {
                    h,
                    method: SelectionMethod::OracleMISE,
                    used_fallback: false,
                    params: None,
                    scaling_constant: None,
                },
                Err(Error::Divergence(msg)) => return Ok(MethodResult::Unavailable(msg)),
                Err(e) => return Err(e),
            }
        }
        MethodId::BetaISEmin | MethodId::LogitISEmin | MethodId::ReflectISEmin => {
            let d = truth.expect("checked above");
            let (lo, hi) = default_bracket(family, s)?;
            let (h, _) = golden_section_log(
                |h| {
                    let m = DensityModel::fit(family, s.clone(), h)?;
                    model_ise(&m, d, &ctx.rule)
                },
                lo,
                hi,
                SEARCH_GRID,
                SEARCH_REL_TOL,
            )?;
            BandwidthSelection {
                h,
                method: SelectionMethod::OracleISE,
                used_fallback: false,
                params: None,
                scaling_constant: None,
            }
        }
    };
    selection.h = cap_for_family(selection.h, family);
    let model = DensityModel::fit(family, s.clone(), selection.h)?;
    let fit_time_s = start.elapsed().as_secs_f64();
    Ok(MethodResult::Fitted(FitOutcome {
        model,
        selection,
        fit_time_s,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandwidth::silverman_bandwidth;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn names_round_trip() {
        for m in MethodId::ALL {
            assert_eq!(m.as_str().parse::<MethodId>().unwrap(), m);
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(json, format!("\"{}\"", m.as_str()));
        }
        assert!("beta-magic".parse::<MethodId>().is_err());
    }

    #[test]
    fn beta_ref_on_nice_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = DistributionSpec::beta(5.0, 5.0).sample(&mut rng, 500);
        let out = run_method(MethodId::BetaRef, &s, None, &MethodContext::default())
            .unwrap()
            .fitted()
            .unwrap();
        assert!(!out.selection.used_fallback);
        assert!(out.fit_time_s < 1e-3, "{}", out.fit_time_s);
    }

    #[test]
    fn oracle_unavailable_for_hard_truth() {
        let d = DistributionSpec::beta(0.5, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = d.sample(&mut rng, 100);
        let ctx = MethodContext::default();
        for m in [MethodId::BetaOracle, MethodId::BetaISEmin, MethodId::ReflectISEmin] {
            assert!(matches!(run_method(m, &s, Some(&d), &ctx).unwrap(), MethodResult::Unavailable(_)));
        }
        assert!(matches!(
            run_method(MethodId::BetaOracle, &s, None, &ctx).unwrap(),
            MethodResult::Unavailable(_)
        ));
    }

    #[test]
    fn reflect_silverman_dispatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = DistributionSpec::beta(2.0, 12.0).sample(&mut rng, 200);
        let out = run_method(MethodId::ReflectSilverman, &s, None, &MethodContext::default())
            .unwrap()
            .fitted()
            .unwrap();
        assert_eq!(out.selection.h, silverman_bandwidth(s.values()).unwrap());
        assert_eq!(out.model.family(), Family::GaussReflect);
    }

    #[test]
    fn isemin_beats_oracle_on_its_own_sample() {
        let d = DistributionSpec::beta(5.0, 5.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = d.sample(&mut rng, 200);
        let ctx = MethodContext::default();
        let ise = |m| {
            let out = run_method(m, &s, Some(&d), &ctx).unwrap().fitted().unwrap();
            model_ise(&out.model, &d, &ctx.rule).unwrap()
        };
        assert!(ise(MethodId::BetaISEmin) <= ise(MethodId::BetaOracle) + 1e-12);
    }
}
