//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bandwidth::KurtosisMode;
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::data::{load_column, ClipPolicy};
use crate::harness::experiment1::{read_records, run_experiment1_with_progress, write_records_to};
use crate::harness::experiment2::{run_experiment2, write_outputs, RealDataConfig};
use crate::harness::methods::{run_method, MethodContext, MethodId, MethodResult};
use crate::harness::plotdata::{aggregate, write_plot_points};
use crate::kernels::DensityModel;

/// Environment variable that overrides the root seed; `--seed` wins over it.
pub const SEED_ENV: &str = "BETAKDE_SEED";

#[derive(Debug, Parser)]
#[command(name = "betakde", version, about = "Beta kernel density estimation on [0, 1]")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a density to one CSV column and print it on a grid.
    Fit(FitArgs),
    /// Select a bandwidth for one CSV column and print it as JSON.
    Bandwidth(BandwidthArgs),
    /// Run the simulation study described by a TOML config.
    Simulate(SimulateArgs),
    /// Cross-validated comparison on real CSV columns.
    Realdata(RealdataArgs),
    /// Aggregate a simulation CSV into mean/sd series.
    Plotdata(PlotdataArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClipArg {
    Reject,
    Clamp,
}

impl From<ClipArg> for ClipPolicy {
    fn from(c: ClipArg) -> Self {
        match c {
            ClipArg::Reject => ClipPolicy::Reject,
            ClipArg::Clamp => ClipPolicy::Clamp,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KurtosisArg {
    Standard,
    SumSquared,
}

impl From<KurtosisArg> for KurtosisMode {
    fn from(k: KurtosisArg) -> Self {
        match k {
            KurtosisArg::Standard => KurtosisMode::Standard,
            KurtosisArg::SumSquared => KurtosisMode::SumSquared,
        }
    }
}

fn parse_method(s: &str) -> std::result::Result<MethodId, String> {
    let m: MethodId = s.parse().map_err(|e: Error| e.to_string())?;
    if m.needs_truth() {
        return Err(format!("{m} needs the true density and is only available in `simulate`"));
    }
    Ok(m)
}

#[derive(Debug, Args)]
struct ColumnArgs {
    /// CSV file with a header row.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    column: String,
    #[arg(long, value_enum, default_value = "reject")]
    clip: ClipArg,
    #[arg(long, value_parser = parse_method, default_value = "beta-ref")]
    method: MethodId,
    #[arg(long, value_enum, default_value = "standard")]
    kurtosis_mode: KurtosisArg,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    column: ColumnArgs,
    /// Use this bandwidth instead of the method's selector.
    #[arg(long)]
    h: Option<f64>,
    /// Number of grid cells; the density is reported at their midpoints.
    #[arg(long, default_value_t = 512)]
    grid: usize,
    /// Rescale the estimate to integrate to one.
    #[arg(long)]
    normalize: bool,
    /// Output CSV (default: standard output).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BandwidthArgs {
    #[command(flatten)]
    column: ColumnArgs,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, env = SEED_ENV)]
    seed: Option<u64>,
    /// Overrides `output_path` from the config.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Overrides `trials` from the config.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, Args)]
struct RealdataArgs {
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated column names.
    #[arg(long, value_delimiter = ',', required = true)]
    columns: Vec<String>,
    #[arg(long, value_enum, default_value = "reject")]
    clip: ClipArg,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, env = SEED_ENV, default_value_t = 20_240_601)]
    seed: u64,
    /// Comma-separated methods (default: the six practical ones).
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    methods: Vec<MethodId>,
    #[arg(long, value_enum, default_value = "standard")]
    kurtosis_mode: KurtosisArg,
    /// Leave fit times empty so outputs are reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    output_dir: PathBuf,
}

#[derive(Debug, Args)]
struct PlotdataArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct BandwidthReport {
    h: f64,
    method: String,
    used_fallback: bool,
    a_hat: Option<f64>,
    b_hat: Option<f64>,
    scaling_constant: Option<f64>,
}

fn output_writer(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(std::io::BufWriter::new(std::fs::File::create(p)?))
        }
        None => Box::new(std::io::stdout().lock()),
    })
}

fn fit_column(args: &ColumnArgs) -> Result<(crate::harness::methods::FitOutcome, usize)> {
    let loaded = load_column(&args.input, &args.column, args.clip.into())?;
    let ctx = MethodContext {
        kurtosis_mode: args.kurtosis_mode.into(),
        ..MethodContext::default()
    };
    match run_method(args.method, &loaded.sample, None, &ctx)? {
        MethodResult::Fitted(f) => Ok((f, loaded.missing)),
        MethodResult::Unavailable(msg) => Err(Error::Config(msg)),
    }
}

fn cmd_fit(args: FitArgs) -> Result<()> {
    if args.grid == 0 {
        return Err(Error::Config("--grid must be positive".into()));
    }
    let (fitted, _) = fit_column(&args.column)?;
    let mut model = match args.h {
        Some(h) => DensityModel::fit(args.column.method.family(), fitted.model.data().clone(), h)?,
        None => fitted.model,
    };
    if args.normalize {
        model = model.normalize(&crate::quadrature::QuadratureRule::default())?;
    }
    let mut w = csv::Writer::from_writer(output_writer(args.output.as_ref())?);
    w.write_record(["x", "density"])?;
    for k in 0..args.grid {
        let x = (k as f64 + 0.5) / args.grid as f64;
        w.write_record([x.to_string(), model.evaluate(x).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_bandwidth(args: BandwidthArgs) -> Result<()> {
    let (fitted, _) = fit_column(&args.column)?;
    let sel = fitted.selection;
    let report = BandwidthReport {
        h: sel.h,
        method: serde_json::to_value(sel.method)?
            .as_str()
            .unwrap_or_default()
            .to_string(),
        used_fallback: sel.used_fallback,
        a_hat: sel.params.map(|p| p.a),
        b_hat: sel.params.map(|p| p.b),
        scaling_constant: sel.scaling_constant,
    };
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.root_seed = seed;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(o) = args.output {
        cfg.output_path = o;
    }
    let quiet = args.quiet;
    let mut last = 0;
    let records = run_experiment1_with_progress(&cfg, |done, total| {
        let pct = 100 * done / total;
        if !quiet && pct != last {
            last = pct;
            eprint!("\r{done}/{total} trials");
        }
    })?;
    if !quiet {
        eprintln!();
    }
    write_records_to(&records, &cfg.output_path)?;
    if !quiet {
        eprintln!("wrote {} rows to {}", records.len(), cfg.output_path.display());
    }
    Ok(())
}

fn cmd_realdata(args: RealdataArgs) -> Result<()> {
    let mut samples = Vec::new();
    for col in &args.columns {
        let loaded = load_column(&args.input, col, args.clip.into())?;
        if loaded.missing > 0 || loaded.clamped > 0 {
            eprintln!("{col}: dropped {} missing, clamped {}", loaded.missing, loaded.clamped);
        }
        samples.push((col.clone(), loaded.sample));
    }
    let mut cfg = RealDataConfig {
        repeats: args.repeats,
        folds: args.folds,
        root_seed: args.seed,
        kurtosis_mode: args.kurtosis_mode.into(),
        timing: !args.no_timing,
        ..RealDataConfig::default()
    };
    if !args.methods.is_empty() {
        cfg.methods = args.methods;
    }
    let out = run_experiment2(&samples, &cfg)?;
    write_outputs(&out, &args.output_dir)?;
    Ok(())
}

fn cmd_plotdata(args: PlotdataArgs) -> Result<()> {
    let records = read_records(&args.input)?;
    write_plot_points(&aggregate(&records), output_writer(args.output.as_ref())?)
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Bandwidth(a) => cmd_bandwidth(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Realdata(a) => cmd_realdata(a),
        Command::Plotdata(a) => cmd_plotdata(a),
    }
}

/// Parses `args` and runs; usage errors exit with 2, failures with 1.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
