use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::BoundReport;
use crate::env::RNG_ALGORITHM;
use crate::error::{Error, Result};
use crate::metrics::AggregateReport;
use crate::oracle::OracleSolution;

use super::config::RunConfig;
use super::Simulation;

/// Headline numbers of a multi-seed run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub rng: String,
    pub policy: String,
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub horizon: u64,
    pub seeds: Vec<u64>,
    pub oracle: OracleSolution,
    pub final_regret: f64,
    pub final_regret_se: f64,
    pub final_avg_tslr: f64,
    pub final_avg_tslr_se: f64,
    pub final_violation_expected: f64,
    pub final_violation_perpath: f64,
    pub zero_violation_point: Option<u64>,
    pub zero_violation_point_perpath: Option<u64>,
    pub lambda: Vec<f64>,
    pub reward_fraction: Vec<f64>,
    pub reward_fraction_se: Vec<f64>,
}

impl RunSummary {
    pub fn new(config: &RunConfig, oracle: &OracleSolution, report: &AggregateReport) -> Self {
        let last = |v: &[f64]| v.last().copied().unwrap_or(0.0);
        Self {
            rng: RNG_ALGORITHM.to_string(),
            policy: config.policy.kind.name().to_string(),
            alpha: config.policy.alpha,
            beta: config.policy.beta,
            epsilon: config.policy.fairness.epsilon,
            horizon: config.horizon,
            seeds: report.seeds.clone(),
            oracle: oracle.clone(),
            final_regret: last(&report.regret),
            final_regret_se: last(&report.regret_se),
            final_avg_tslr: last(&report.avg_tslr),
            final_avg_tslr_se: last(&report.avg_tslr_se),
            final_violation_expected: last(&report.violation_expected),
            final_violation_perpath: last(&report.violation_perpath),
            zero_violation_point: report.zero_violation_point,
            zero_violation_point_perpath: report.zero_violation_point_perpath,
            lambda: report.lambda.clone(),
            reward_fraction: report.reward_fraction.clone(),
            reward_fraction_se: report.reward_fraction_se.clone(),
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `config.json`, `series.csv`, `summary.json` and `bounds.json` into `dir`.
pub fn write_run_dir(
    dir: &Path,
    sim: &Simulation,
    report: &AggregateReport,
    bounds: &BoundReport,
) -> Result<RunSummary> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut echo = sim.config().clone();
    echo.seeds = report.seeds.clone();
    echo.out_dir = None;
    write_json(&dir.join("config.json"), &echo)?;
    let csv_path = dir.join("series.csv");
    let file = File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    report.write_csv(BufWriter::new(file))?;
    let summary = RunSummary::new(sim.config(), sim.oracle(), report);
    write_json(&dir.join("summary.json"), &summary)?;
    write_json(&dir.join("bounds.json"), bounds)?;
    Ok(summary)
}
