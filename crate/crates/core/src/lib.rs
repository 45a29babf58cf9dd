//! Beta kernel density estimation on the unit interval.
//!
//! The core pieces are the boundary-corrected beta kernel estimator
//! ([`kernels`]), the closed-form beta reference bandwidth with its fallback
//! ([`bandwidth::select_bandwidth`]), Gaussian baselines, LSCV and oracle
//! selectors, and the experiment harness behind the `betakde` binary.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bandwidth;
pub mod distributions;
pub mod error;
pub mod harness;
pub mod kernels;
pub mod metrics;
pub mod quadrature;
pub mod special;

pub use bandwidth::{
    h_ref, heuristic_scaling, i1_closed, i2_closed, mom_estimate, oracle_bandwidth, select_bandwidth,
    BandwidthSelection, BetaParams, KurtosisMode, MomEstimate, SelectionMethod,
};
pub use distributions::DistributionSpec;
pub use error::{Error, Result};
pub use kernels::{DensityModel, Family, Sample};
pub use quadrature::{QuadratureRule, UnitPoint};
