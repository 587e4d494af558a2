//! Per-arm scheduler state and its round-by-round dynamics.
//!
//! Every fairness unit (an arm, or a user/node in grouped settings) carries a
//! virtual queue tracking its accumulated reward debt and a time-since-last-reward
//! (TSLR) counter. The two are coupled: starting from zero, every sample path
//! satisfies `1 + queue >= lambda * tslr`, which [`lemma1_holds`] checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when checking the queue/TSLR coupling on a live trajectory.
pub const LEMMA1_TOLERANCE: f64 = 1e-9;

/// Pull count and accumulated 0/1 reward of a single arm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PullStats {
    pub pulls: u64,
    pub reward_sum: u64,
}

impl PullStats {
    /// Sample mean of received rewards; 1 for an arm that was never pulled.
    pub fn mean(&self) -> f64 {
        if self.pulls == 0 {
            1.0
        } else {
            self.reward_sum as f64 / self.pulls as f64
        }
    }

    pub fn record(&mut self, pulled: bool, reward: bool) {
        if pulled {
            self.pulls += 1;
            if reward {
                self.reward_sum += 1;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ArmState {
    /// Virtual queue length, in reward units.
    pub queue: f64,
    /// Rounds since the last reward; 0 only before the first round.
    pub tslr: u64,
    pub stats: PullStats,
}

impl ArmState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pulls(&self) -> u64 {
        self.stats.pulls
    }

    pub fn reward_sum(&self) -> u64 {
        self.stats.reward_sum
    }

    pub fn mean(&self) -> f64 {
        self.stats.mean()
    }

    pub fn update_stats(&mut self, pulled: bool, reward: bool) {
        self.stats.record(pulled, reward);
    }

    /// Applies one round: queue and TSLR react to whether a reward was received,
    /// pull statistics to whether the arm was pulled at all.
    pub fn advance(&mut self, lambda: f64, epsilon: f64, pulled: bool, reward: bool) {
        let got_reward = pulled && reward;
        self.queue = update_queue(self.queue, lambda, epsilon, got_reward);
        self.tslr = update_tslr(self.tslr, got_reward);
        self.update_stats(pulled, reward);
    }
}

/// Minimum average reward per unit and the queue pad.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FairnessSpec {
    pub lambda: Vec<f64>,
    pub epsilon: f64,
}

impl FairnessSpec {
    pub fn new(lambda: Vec<f64>, epsilon: f64) -> Result<Self> {
        let spec = Self { lambda, epsilon };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda.is_empty() {
            return Err(Error::InvalidParameter("lambda must not be empty".into()));
        }
        if let Some((n, l)) = self
            .lambda
            .iter()
            .enumerate()
            .find(|(_, l)| !(l.is_finite() && **l > 0.0 && **l <= 1.0))
        {
            return Err(Error::InvalidParameter(format!(
                "lambda[{n}] = {l} must lie in (0, 1]"
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon = {} must lie in (0, 1)",
                self.epsilon
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `max(queue + lambda - 1[got_reward] + epsilon, 0)`.
///
/// Panics on a negative or non-finite queue, which can only come from a caller bug.
pub fn update_queue(queue: f64, lambda_n: f64, epsilon: f64, got_reward: bool) -> f64 {
    assert!(
        queue >= 0.0 && queue.is_finite(),
        "virtual queue must be finite and nonnegative, got {queue}"
    );
    let served = if got_reward { 1.0 } else { 0.0 };
    (queue + lambda_n - served + epsilon).max(0.0)
}

pub fn update_tslr(tslr: u64, got_reward: bool) -> u64 {
    if got_reward {
        1
    } else {
        tslr + 1
    }
}

/// `1 + queue >= lambda_n * tslr - tolerance`.
pub fn lemma1_holds(state: &ArmState, lambda_n: f64, tolerance: f64) -> bool {
    1.0 + state.queue >= lambda_n * state.tslr as f64 - tolerance
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn queue_examples() {
        assert_eq!(update_queue(0.5, 0.3, 0.001, true), 0.0);
        assert_abs_diff_eq!(update_queue(2.0, 0.1, 0.001, false), 2.101, epsilon = 1e-12);
        assert_eq!(update_queue(0.0, 0.8 * 0.7 / 21.0, 0.001, true), 0.0);
    }

    #[test]
    #[should_panic(expected = "nonnegative")]
    fn negative_queue_is_rejected() {
        update_queue(-0.1, 0.3, 0.001, false);
    }

    #[test]
    fn tslr_examples() {
        assert_eq!(update_tslr(5, true), 1);
        assert_eq!(update_tslr(5, false), 6);
        assert_eq!(update_tslr(0, false), 1);
    }

    #[test]
    fn stats_examples() {
        let mut s = ArmState::new();
        assert_eq!(s.mean(), 1.0);
        s.update_stats(true, true);
        assert_eq!((s.pulls(), s.reward_sum(), s.mean()), (1, 1, 1.0));

        let mut s = ArmState {
            stats: PullStats {
                pulls: 4,
                reward_sum: 3,
            },
            ..ArmState::new()
        };
        let idle = s;
        s.update_stats(false, true);
        assert_eq!(s, idle);
        assert_eq!(s.mean(), 0.75);
        s.update_stats(true, false);
        assert_eq!((s.pulls(), s.reward_sum()), (5, 3));
        assert_abs_diff_eq!(s.mean(), 0.6, epsilon = 1e-15);
    }

    #[test]
    fn lemma1_examples() {
        let at = |queue, tslr| ArmState {
            queue,
            tslr,
            ..ArmState::new()
        };
        assert!(lemma1_holds(&at(0.0, 0), 0.5, LEMMA1_TOLERANCE));
        assert!(lemma1_holds(&at(0.0, 1), 0.5, LEMMA1_TOLERANCE));
        assert!(lemma1_holds(&at(2.101, 30), 0.1, LEMMA1_TOLERANCE));
        assert!(!lemma1_holds(&at(0.0, 3), 0.5, LEMMA1_TOLERANCE));
    }

    #[test]
    fn fairness_spec_validation() {
        assert!(FairnessSpec::new(vec![0.1, 0.2], 0.001).is_ok());
        assert!(FairnessSpec::new(vec![0.0, 0.2], 0.001).is_err());
        assert!(FairnessSpec::new(vec![0.1], 0.0).is_err());
        assert!(FairnessSpec::new(vec![0.1], 1.0).is_err());
        assert!(FairnessSpec::new(vec![], 0.1).is_err());
    }

    proptest! {
        #[test]
        fn lemma1_on_every_path(
            lambda in 0.001f64..1.0,
            epsilon in 0.0001f64..0.5,
            events in prop::collection::vec((any::<bool>(), any::<bool>()), 1..400),
        ) {
            let mut s = ArmState::new();
            prop_assert!(lemma1_holds(&s, lambda, LEMMA1_TOLERANCE));
            for (pulled, reward) in events {
                let before = s;
                s.advance(lambda, epsilon, pulled, reward);
                prop_assert!(lemma1_holds(&s, lambda, LEMMA1_TOLERANCE));
                prop_assert!(s.tslr >= 1);
                prop_assert!(s.queue >= 0.0);
                prop_assert!((0.0..=1.0).contains(&s.mean()));
                if pulled && reward {
                    prop_assert!(before.queue - s.queue <= 1.0 - lambda - epsilon + 1e-12);
                } else {
                    prop_assert!((s.queue - before.queue - (lambda + epsilon)).abs() < 1e-9);
                }
            }
        }
    }
}
