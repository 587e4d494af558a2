//! Experiment runner: prepares an instance once, simulates seeds in parallel
//! and folds them into seed-averaged reports.

pub mod config;
pub mod output;
pub mod presets;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{bound_report, drift_diagnostics, lyapunov_v, lyapunov_v1, telescoping_sums, BoundInputs, BoundReport, DriftReport};
use crate::env::{ArmLayout, Environment, RngStream};
use crate::error::{Error, Result};
use crate::metrics::{aggregate, AggregateReport, SeriesRecorder, SeriesReport};
use crate::oracle::{max_tightness, solve_marginal_lp, OracleSolution};
use crate::policy::{RoundLog, Scheduler};

pub use config::{EnvironmentSpec, RunConfig, SweepAxis, SweepConfig, SweepValue};
pub use output::{write_run_dir, RunSummary};

/// Per-unit means: a group counts at its best sub-arm.
pub fn unit_means(layout: &ArmLayout, pair_means: &[f64]) -> Vec<f64> {
    (0..layout.units())
        .map(|u| {
            layout
                .pair_range(u)
                .map(|p| pair_means[p])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// A validated, loaded instance ready to simulate any number of seeds.
#[derive(Clone, Debug)]
pub struct Simulation {
    config: RunConfig,
    env: Environment,
    layout: ArmLayout,
    pair_means: Vec<f64>,
    unit_means: Vec<f64>,
    oracle: OracleSolution,
}

impl Simulation {
    pub fn new(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let env = config.environment.build()?;
        let layout = env.layout();
        config.family.validate(&layout)?;
        if config.policy.fairness.len() != layout.units() {
            return Err(Error::DimensionMismatch {
                what: "lambda",
                got: config.policy.fairness.len(),
                expected: layout.units(),
            });
        }
        if let Some(h) = env.horizon() {
            if h < config.horizon {
                return Err(Error::OutOfTrace {
                    t: config.horizon,
                    horizon: h,
                });
            }
        }
        let pair_means = env.pair_means();
        let unit_means = unit_means(&layout, &pair_means);
        let lambda = &config.policy.fairness.lambda;
        let budget = config.family.budget();
        let delta_star = max_tightness(&unit_means, lambda, budget)?;
        if delta_star <= 0.0 {
            return Err(Error::Infeasible { delta_star });
        }
        let oracle = solve_marginal_lp(&unit_means, lambda, config.benchmark_delta, budget)?;
        Ok(Self {
            config: config.clone(),
            env,
            layout,
            pair_means,
            unit_means,
            oracle,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn environment(&self) -> &Environment {
        &self.env
    }

    pub fn layout(&self) -> &ArmLayout {
        &self.layout
    }

    pub fn oracle(&self) -> &OracleSolution {
        &self.oracle
    }

    pub fn unit_means(&self) -> &[f64] {
        &self.unit_means
    }

    pub fn pair_means(&self) -> &[f64] {
        &self.pair_means
    }

    fn scheduler(&self, seed: u64) -> Result<Scheduler> {
        let known = self
            .config
            .policy
            .known_mu
            .clone()
            .unwrap_or_else(|| self.pair_means.clone());
        Scheduler::new(
            self.config.policy.clone(),
            self.config.family,
            self.layout.clone(),
            Some(known),
            seed,
        )
    }

    /// Simulates rounds `1..=T`, handing every round to `observe` after the update.
    pub fn simulate(&self, seed: u64, mut observe: impl FnMut(&RoundLog, &Scheduler)) -> Result<()> {
        let mut rng = RngStream::new(seed, self.layout.pairs());
        let mut sched = self.scheduler(seed)?;
        let mut outcomes = vec![false; self.layout.pairs()];
        let mut log = RoundLog::default();
        for r in 0..self.config.horizon {
            self.env.sample_into(&mut rng, r, &mut outcomes)?;
            sched.step(&outcomes, r + 1, &mut log)?;
            observe(&log, &sched);
        }
        Ok(())
    }

    pub fn run(&self, seed: u64) -> Result<SeriesReport> {
        let mut rec = SeriesRecorder::new(
            seed,
            self.config.policy.fairness.lambda.clone(),
            self.pair_means.clone(),
            self.oracle.optimal_rate,
            self.config.record_interval,
            self.config.horizon,
        );
        self.simulate(seed, |log, _| rec.observe(log))?;
        Ok(rec.finish())
    }

    /// Every seed in parallel, merged in ascending seed order.
    pub fn run_many(&self, seeds: &[u64]) -> Result<AggregateReport> {
        let mut seeds = seeds.to_vec();
        seeds.sort_unstable();
        seeds.dedup();
        let reports = seeds
            .par_iter()
            .map(|&s| self.run(s))
            .collect::<Result<Vec<_>>>()?;
        aggregate(&reports)
    }

    pub fn bound_inputs(&self) -> BoundInputs {
        let mu = &self.unit_means;
        let fold = |f: fn(f64, f64) -> f64, init| mu.iter().copied().fold(init, f);
        BoundInputs {
            n: self.layout.units(),
            s_max: self.config.family.budget(),
            mu_min: fold(f64::min, f64::INFINITY),
            mu_max: fold(f64::max, f64::NEG_INFINITY),
            lambda_min: self.config.policy.fairness.lambda_min(),
            delta: self.oracle.delta_star,
            alpha: self.config.policy.effective_alpha(),
            beta: self.config.policy.effective_beta(),
            epsilon: self.config.policy.fairness.epsilon,
            horizon: self.config.horizon,
        }
    }

    /// Analytic guarantees for this instance. Two-unit instances also get the
    /// fixed-weight period, using the means the policy schedules with.
    pub fn bounds(&self) -> Result<BoundReport> {
        let two_arm = (self.layout.units() == 2).then(|| {
            let mu = match &self.config.policy.known_mu {
                Some(k) => unit_means(&self.layout, k),
                None => self.unit_means.clone(),
            };
            let lambda = &self.config.policy.fairness.lambda;
            let (strong, weak) = if mu[0] >= mu[1] { (0, 1) } else { (1, 0) };
            (mu[strong], mu[weak], lambda[weak])
        });
        bound_report(&self.bound_inputs(), two_arm)
    }

    /// Replays the first seed, recording `V(t)` and `V1(t)` for drift checks.
    pub fn check(&self, level_override: Option<f64>) -> Result<CheckReport> {
        let seed = *self.config.seeds.iter().min().expect("validated");
        let alpha = self.config.policy.effective_alpha();
        let mu = self.unit_means.clone();
        let mut v = vec![0.0];
        let mut v1 = vec![0.0];
        self.simulate(seed, |_, sched| {
            v.push(lyapunov_v(sched.units(), alpha, &mu));
            v1.push(lyapunov_v1(sched.units(), alpha, &mu));
        })?;
        let drift = drift_diagnostics(&v, &self.bound_inputs(), level_override);
        let (sum_diffs, endpoint_diff) = telescoping_sums(&v1);
        let telescoping_holds = (sum_diffs - endpoint_diff).abs() <= TELESCOPING_TOLERANCE * endpoint_diff.abs().max(1.0);
        Ok(CheckReport {
            seed,
            rounds: self.config.horizon,
            lemma1_holds: true,
            drift,
            telescoping: Telescoping {
                sum_diffs,
                endpoint_diff,
                holds: telescoping_holds,
            },
        })
    }
}

/// Relative tolerance on the telescoping identity.
pub const TELESCOPING_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Telescoping {
    pub sum_diffs: f64,
    pub endpoint_diff: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub seed: u64,
    pub rounds: u64,
    pub lemma1_holds: bool,
    pub drift: DriftReport,
    pub telescoping: Telescoping,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.lemma1_holds && self.drift.absolute_bound_holds() && self.telescoping.holds
    }
}

pub fn run(config: &RunConfig, seed: u64) -> Result<SeriesReport> {
    Simulation::new(config)?.run(seed)
}

pub fn run_many(config: &RunConfig, seeds: &[u64]) -> Result<AggregateReport> {
    Simulation::new(config)?.run_many(seeds)
}

/// One swept point: its value, its config and the seed-averaged result.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub value: SweepValue,
    pub config: RunConfig,
    pub simulation: Simulation,
    pub report: AggregateReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: SweepValue,
    pub final_regret: f64,
    pub final_avg_tslr: f64,
    pub final_violation: f64,
    pub zero_violation_point: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
}

pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepPoint>> {
    let points = config.points()?;
    points
        .into_par_iter()
        .zip(config.values.par_iter())
        .map(|(cfg, value)| {
            let sim = Simulation::new(&cfg)?;
            let report = sim.run_many(&cfg.seeds)?;
            Ok(SweepPoint {
                value: value.clone(),
                config: cfg,
                simulation: sim,
                report,
            })
        })
        .collect()
}

pub fn sweep_summary(axis: SweepAxis, points: &[SweepPoint]) -> SweepSummary {
    SweepSummary {
        axis,
        rows: points
            .iter()
            .map(|p| SweepRow {
                value: p.value.clone(),
                final_regret: p.report.final_regret(),
                final_avg_tslr: p.report.final_avg_tslr(),
                final_violation: p.report.final_violation(),
                zero_violation_point: p.report.zero_violation_point,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::LEMMA1_TOLERANCE;

    fn short(preset: presets::Preset, horizon: u64) -> RunConfig {
        preset.config.with_horizon(horizon)
    }

    #[test]
    fn smoke_run_keeps_lemma1() {
        let cfg = short(presets::synthetic_fig5(), 1000);
        let sim = Simulation::new(&cfg).unwrap();
        let lambda = cfg.policy.fairness.lambda.clone();
        let mut rounds = 0;
        sim.simulate(0, |log, sched| {
            rounds += 1;
            for (s, l) in sched.units().iter().zip(&lambda) {
                assert!(s.queue.is_finite());
                assert!(1.0 + s.queue + LEMMA1_TOLERANCE >= l * s.tslr as f64);
            }
            assert_eq!(log.selected.len(), 1);
        })
        .unwrap();
        assert_eq!(rounds, 1000);
    }

    #[test]
    fn single_round_regret() {
        let mut cfg = short(presets::synthetic_fig5(), 1);
        cfg.record_interval = 1;
        let sim = Simulation::new(&cfg).unwrap();
        let rep = sim.run(0).unwrap();
        assert_eq!(rep.t, vec![1]);
        // Every weight ties at round one and the lowest index wins.
        let expected = sim.oracle().optimal_rate - 0.7;
        assert!((rep.regret[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn runs_are_deterministic() {
        let cfg = short(presets::synthetic_fig5(), 3000);
        assert_eq!(run(&cfg, 7).unwrap(), run(&cfg, 7).unwrap());
    }

    #[test]
    fn seed_order_does_not_matter() {
        let cfg = short(presets::synthetic_fig6(), 2000);
        let a = run_many(&cfg, &[3, 1, 2]).unwrap();
        let b = run_many(&cfg, &[1, 2, 3]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.seeds, vec![1, 2, 3]);
    }

    #[test]
    fn deterministic_env_has_no_spread() {
        let cfg = short(presets::roundrobin_limit(), 500);
        let agg = run_many(&cfg, &[0, 1, 2, 3]).unwrap();
        assert!(agg.regret_se.iter().all(|s| *s == 0.0));
        assert!(agg.avg_tslr_se.iter().all(|s| *s == 0.0));
    }

    #[test]
    fn infeasible_targets_are_rejected() {
        let mut cfg = short(presets::synthetic_fig5(), 10);
        cfg.policy.fairness.lambda = vec![0.3; 6];
        let err = Simulation::new(&cfg).unwrap_err();
        assert!(matches!(err, Error::Infeasible { delta_star } if delta_star <= 0.0));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn remark3_bounds_report_tau0() {
        let sim = Simulation::new(&presets::remark3().config).unwrap();
        assert_eq!(sim.bounds().unwrap().tau0, Some(4));
    }

    #[test]
    fn check_mode_with_level_override() {
        let sim = Simulation::new(&short(presets::synthetic_fig5(), 5000)).unwrap();
        let rep = sim.check(Some(0.0)).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.drift.conditioned_steps, 5000);
    }

    #[test]
    fn sweep_keeps_value_order() {
        let base = short(presets::synthetic_fig5(), 1000).with_seeds(vec![0, 1]);
        let s = SweepConfig::numeric(base, SweepAxis::Alpha, &[5.0, 0.1]);
        let pts = sweep(&s).unwrap();
        assert_eq!(pts[0].config.policy.alpha, 5.0);
        assert_eq!(pts[1].config.policy.alpha, 0.1);
        assert_eq!(sweep_summary(SweepAxis::Alpha, &pts).rows.len(), 2);
    }
}
