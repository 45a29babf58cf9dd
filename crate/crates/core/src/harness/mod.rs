//! Simulation and real-data studies, and the command-line interface.

pub mod cli;
pub mod config;
pub mod data;
pub mod experiment1;
pub mod experiment2;
pub mod methods;
pub mod plotdata;
pub mod seeds;

pub use config::{ExperimentConfig, LabeledDistribution};
pub use data::{load_column, ClipPolicy};
pub use experiment1::{run_experiment1, TrialRecord};
pub use experiment2::{run_experiment2, RealDataConfig};
pub use methods::{run_method, MethodContext, MethodId, MethodResult};
