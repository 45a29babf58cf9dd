//! Mean and standard deviation series from a simulation results file.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harness::experiment1::TrialRecord;
use crate::harness::methods::MethodId;

pub const PLOT_HEADER: [&str; 7] = ["metric", "distribution", "method", "n", "count", "mean", "sd"];

/// Metrics summarized, one series per (distribution, method) over n.
pub const METRICS: [&str; 6] = ["ise", "lscv_kfold", "fit_time_s", "h", "mass_err", "fallback_rate"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub metric: String,
    pub distribution: String,
    pub method: MethodId,
    pub n: usize,
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
}

fn metric_value(r: &TrialRecord, metric: &str) -> Option<f64> {
    match metric {
        "ise" => r.ise,
        "lscv_kfold" => r.lscv_kfold,
        "fit_time_s" => r.fit_time_s,
        "h" => Some(r.h),
        "mass_err" => r.mass_err,
        "fallback_rate" => r.used_fallback.map(|b| if b { 1.0 } else { 0.0 }),
        _ => None,
    }
}

/// Groups by (metric, distribution, method, n). Distributions keep their
/// order of first appearance, methods their canonical order. Groups with no
/// values are omitted.
pub fn aggregate(records: &[TrialRecord]) -> Vec<PlotPoint> {
    let mut dist_order: Vec<&str> = Vec::new();
    for r in records {
        if !dist_order.contains(&r.distribution.as_str()) {
            dist_order.push(&r.distribution);
        }
    }
    let mut out = Vec::new();
    for metric in METRICS {
        let mut groups: BTreeMap<(usize, MethodId, usize), Vec<f64>> = BTreeMap::new();
        for r in records {
            if let Some(v) = metric_value(r, metric) {
                let di = dist_order.iter().position(|d| *d == r.distribution).expect("seen");
                groups.entry((di, r.method, r.n)).or_default().push(v);
            }
        }
        for ((di, method, n), v) in groups {
            let count = v.len();
            let mean = v.iter().sum::<f64>() / count as f64;
            let sd = if count > 1 {
                (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
            } else {
                0.0
            };
            out.push(PlotPoint {
                metric: metric.to_string(),
                distribution: dist_order[di].to_string(),
                method,
                n,
                count,
                mean,
                sd,
            });
        }
    }
    out
}

pub fn write_plot_points<W: Write>(points: &[PlotPoint], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(PLOT_HEADER)?;
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}
