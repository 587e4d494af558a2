//! Performance functionals over trajectories: cumulative regret, cumulative
//! fairness violation, zero-violation point, running-average TSLR and per-unit
//! reward fractions.
//!
//! The `history` functions fold a full `RoundLog` sequence and return one value
//! per round. [`SeriesRecorder`] computes the same quantities online and keeps
//! them every `record_interval` rounds; recorded values are exact running sums.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::RoundLog;

/// Values at or below this count as zero violation.
pub const ZERO_TOLERANCE: f64 = 1e-9;

/// `regret(t) = t * optimal_rate - sum_{tau < t} sum_pulled mu`, one entry per round.
pub fn cumulative_regret(history: &[RoundLog], pair_mu: &[f64], optimal_rate: f64) -> Result<Vec<f64>> {
    let mut realized = 0.0;
    history
        .iter()
        .enumerate()
        .map(|(i, log)| {
            for &p in &log.selected {
                realized += pair_mu.get(p).ok_or(Error::DimensionMismatch {
                    what: "pair means",
                    got: pair_mu.len(),
                    expected: p + 1,
                })?;
            }
            Ok((i + 1) as f64 * optimal_rate - realized)
        })
        .collect()
}

/// Per-path cumulative violation `sum_n (sum_{tau < t} (lambda_n - reward_n))^+`.
pub fn cumulative_violation(history: &[RoundLog], lambda: &[f64]) -> Vec<f64> {
    let mut rewards = vec![0u64; lambda.len()];
    history
        .iter()
        .enumerate()
        .map(|(i, log)| {
            for (r, &got) in rewards.iter_mut().zip(&log.unit_rewards) {
                *r += got as u64;
            }
            violation_from_rewards(rewards.iter().map(|&r| r as f64), lambda, (i + 1) as u64)
        })
        .collect()
}

/// Violation at round `t` given cumulative (possibly seed-averaged) rewards.
pub fn violation_from_rewards(
    cum_rewards: impl IntoIterator<Item = f64>,
    lambda: &[f64],
    t: u64,
) -> f64 {
    cum_rewards
        .into_iter()
        .zip(lambda)
        .map(|(r, l)| (l * t as f64 - r).max(0.0))
        .sum()
}

/// Smallest index from which the series stays at zero, `None` if it never settles.
pub fn zero_violation_point(series: &[f64]) -> Option<usize> {
    let tail = series.iter().rev().take_while(|v| **v <= ZERO_TOLERANCE).count();
    (tail > 0).then(|| series.len() - tail)
}

/// `(1/t) sum_{tau < t} sum_n Z_n(tau)` with `Z(0) = 0`, one entry per round.
pub fn running_avg_tslr(history: &[RoundLog]) -> Vec<f64> {
    let mut total = 0u64;
    let mut current = 0u64;
    history
        .iter()
        .enumerate()
        .map(|(i, log)| {
            total += current;
            current = log.tslrs.iter().sum();
            total as f64 / (i + 1) as f64
        })
        .collect()
}

/// Average received reward per unit over the history.
pub fn reward_fractions(history: &[RoundLog]) -> Vec<f64> {
    let Some(first) = history.first() else {
        return Vec::new();
    };
    let mut sums = vec![0u64; first.unit_rewards.len()];
    for log in history {
        for (s, &r) in sums.iter_mut().zip(&log.unit_rewards) {
            *s += r as u64;
        }
    }
    sums.iter().map(|&s| s as f64 / history.len() as f64).collect()
}

/// One trajectory's recorded series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub seed: u64,
    pub lambda: Vec<f64>,
    /// Rounds completed at each record.
    pub t: Vec<u64>,
    pub regret: Vec<f64>,
    /// Per-path cumulative violation.
    pub violation: Vec<f64>,
    pub avg_tslr: Vec<f64>,
    pub queues: Vec<Vec<f64>>,
    pub tslrs: Vec<Vec<u64>>,
    pub cum_rewards: Vec<Vec<u64>>,
    pub reward_fraction: Vec<f64>,
    pub zero_violation_point: Option<u64>,
}

/// Online fold from `RoundLog`s to a [`SeriesReport`].
#[derive(Clone, Debug)]
pub struct SeriesRecorder {
    interval: u64,
    horizon: u64,
    pair_mu: Vec<f64>,
    optimal_rate: f64,
    realized: f64,
    tslr_total: u64,
    tslr_current: u64,
    cum_rewards: Vec<u64>,
    rounds: u64,
    report: SeriesReport,
}

impl SeriesRecorder {
    pub fn new(
        seed: u64,
        lambda: Vec<f64>,
        pair_mu: Vec<f64>,
        optimal_rate: f64,
        interval: u64,
        horizon: u64,
    ) -> Self {
        let units = lambda.len();
        Self {
            interval: interval.max(1),
            horizon,
            pair_mu,
            optimal_rate,
            realized: 0.0,
            tslr_total: 0,
            tslr_current: 0,
            cum_rewards: vec![0; units],
            rounds: 0,
            report: SeriesReport {
                seed,
                lambda,
                t: Vec::new(),
                regret: Vec::new(),
                violation: Vec::new(),
                avg_tslr: Vec::new(),
                queues: Vec::new(),
                tslrs: Vec::new(),
                cum_rewards: Vec::new(),
                reward_fraction: Vec::new(),
                zero_violation_point: None,
            },
        }
    }

    pub fn observe(&mut self, log: &RoundLog) {
        for &p in &log.selected {
            self.realized += self.pair_mu[p];
        }
        for (r, &got) in self.cum_rewards.iter_mut().zip(&log.unit_rewards) {
            *r += got as u64;
        }
        self.tslr_total += self.tslr_current;
        self.tslr_current = log.tslrs.iter().sum();
        self.rounds += 1;
        let t = self.rounds;
        if t.is_multiple_of(self.interval) || t == self.horizon {
            let r = &mut self.report;
            r.t.push(t);
            r.regret.push(t as f64 * self.optimal_rate - self.realized);
            r.violation.push(violation_from_rewards(
                self.cum_rewards.iter().map(|&c| c as f64),
                &r.lambda,
                t,
            ));
            r.avg_tslr.push(self.tslr_total as f64 / t as f64);
            r.queues.push(log.queues.clone());
            r.tslrs.push(log.tslrs.clone());
            r.cum_rewards.push(self.cum_rewards.clone());
        }
    }

    pub fn finish(mut self) -> SeriesReport {
        let t = self.rounds.max(1) as f64;
        self.report.reward_fraction = self.cum_rewards.iter().map(|&c| c as f64 / t).collect();
        self.report.zero_violation_point =
            zero_violation_point(&self.report.violation).map(|i| self.report.t[i]);
        self.report
    }
}

/// Seed-aggregated series: means with standard errors across seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub seeds: Vec<u64>,
    pub lambda: Vec<f64>,
    pub t: Vec<u64>,
    pub regret: Vec<f64>,
    pub regret_se: Vec<f64>,
    /// Violation of the seed-averaged reward series (expectation inside the positive part).
    pub violation_expected: Vec<f64>,
    /// Seed mean of the per-path violation.
    pub violation_perpath: Vec<f64>,
    pub avg_tslr: Vec<f64>,
    pub avg_tslr_se: Vec<f64>,
    pub queues: Vec<Vec<f64>>,
    pub tslrs: Vec<Vec<f64>>,
    pub fractions: Vec<Vec<f64>>,
    pub reward_fraction: Vec<f64>,
    pub reward_fraction_se: Vec<f64>,
    pub zero_violation_point: Option<u64>,
    pub zero_violation_point_perpath: Option<u64>,
}

fn mean_se(xs: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.clone().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Averages per-seed reports in the order given.
pub fn aggregate(reports: &[SeriesReport]) -> Result<AggregateReport> {
    let first = reports
        .first()
        .ok_or_else(|| Error::InvalidParameter("no seeds to aggregate".into()))?;
    if let Some(bad) = reports.iter().find(|r| r.t != first.t || r.lambda.len() != first.lambda.len()) {
        return Err(Error::InvalidParameter(format!(
            "seed {} was recorded on a different grid",
            bad.seed
        )));
    }
    let records = first.t.len();
    let units = first.lambda.len();
    let k = reports.len() as f64;
    let per_record = |f: &dyn Fn(&SeriesReport, usize) -> f64| -> (Vec<f64>, Vec<f64>) {
        (0..records)
            .map(|i| mean_se(reports.iter().map(|r| f(r, i)).collect::<Vec<_>>().into_iter()))
            .unzip()
    };
    let per_unit = |f: &dyn Fn(&SeriesReport, usize, usize) -> f64| -> Vec<Vec<f64>> {
        (0..records)
            .map(|i| {
                (0..units)
                    .map(|u| reports.iter().map(|r| f(r, i, u)).sum::<f64>() / k)
                    .collect()
            })
            .collect()
    };

    let (regret, regret_se) = per_record(&|r, i| r.regret[i]);
    let (avg_tslr, avg_tslr_se) = per_record(&|r, i| r.avg_tslr[i]);
    let (violation_perpath, _) = per_record(&|r, i| r.violation[i]);
    let mean_rewards = per_unit(&|r, i, u| r.cum_rewards[i][u] as f64);
    let violation_expected: Vec<f64> = mean_rewards
        .iter()
        .zip(&first.t)
        .map(|(rw, &t)| violation_from_rewards(rw.iter().copied(), &first.lambda, t))
        .collect();
    let fractions = mean_rewards
        .iter()
        .zip(&first.t)
        .map(|(rw, &t)| rw.iter().map(|r| r / t as f64).collect())
        .collect();
    let (reward_fraction, reward_fraction_se) = (0..units)
        .map(|u| mean_se(reports.iter().map(|r| r.reward_fraction[u]).collect::<Vec<_>>().into_iter()))
        .unzip();
    let zvp = |s: &[f64]| zero_violation_point(s).map(|i| first.t[i]);

    Ok(AggregateReport {
        seeds: reports.iter().map(|r| r.seed).collect(),
        lambda: first.lambda.clone(),
        t: first.t.clone(),
        zero_violation_point: zvp(&violation_expected),
        zero_violation_point_perpath: zvp(&violation_perpath),
        regret,
        regret_se,
        violation_expected,
        violation_perpath,
        avg_tslr,
        avg_tslr_se,
        queues: per_unit(&|r, i, u| r.queues[i][u]),
        tslrs: per_unit(&|r, i, u| r.tslrs[i][u] as f64),
        fractions,
        reward_fraction,
        reward_fraction_se,
    })
}

impl AggregateReport {
    pub fn final_regret(&self) -> f64 {
        self.regret.last().copied().unwrap_or(0.0)
    }

    pub fn final_avg_tslr(&self) -> f64 {
        self.avg_tslr.last().copied().unwrap_or(0.0)
    }

    pub fn final_violation(&self) -> f64 {
        self.violation_expected.last().copied().unwrap_or(0.0)
    }

    /// `t,regret,violation_expected,violation_perpath,avg_tslr,q_0..,z_0..,frac_0..`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let units = self.lambda.len();
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = ["t", "regret", "violation_expected", "violation_perpath", "avg_tslr"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        for prefix in ["q", "z", "frac"] {
            header.extend((0..units).map(|u| format!("{prefix}_{u}")));
        }
        w.write_record(&header)?;
        for i in 0..self.t.len() {
            let mut row = vec![
                self.t[i].to_string(),
                self.regret[i].to_string(),
                self.violation_expected[i].to_string(),
                self.violation_perpath[i].to_string(),
                self.avg_tslr[i].to_string(),
            ];
            row.extend(self.queues[i].iter().map(f64::to_string));
            row.extend(self.tslrs[i].iter().map(f64::to_string));
            row.extend(self.fractions[i].iter().map(f64::to_string));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io("series.csv", e))?;
        Ok(())
    }
}
