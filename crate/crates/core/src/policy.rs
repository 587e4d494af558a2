//! Arm-selection rules.
//!
//! The regular-and-fair rule scores each fairness unit by
//! `queue + alpha * tslr + beta * ucb` and pulls the feasible set of maximal
//! total score. Baselines are the same rule with knobs pinned, pure UCB, round
//! robin, and a variant that scores with the true means instead of UCB
//! estimates.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::env::{ArmLayout, RngStream};
use crate::error::{Error, Result};
use crate::state::{lemma1_holds, ArmState, FairnessSpec, PullStats, LEMMA1_TOLERANCE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Rfl,
    /// `alpha` forced to 0.
    FairOnly,
    /// `beta` forced to 0.
    RegularOnly,
    UcbOnly,
    RoundRobin,
    /// Scores with the true means in place of UCB estimates.
    FixedWeight,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 6] = [
        PolicyKind::Rfl,
        PolicyKind::FairOnly,
        PolicyKind::RegularOnly,
        PolicyKind::UcbOnly,
        PolicyKind::RoundRobin,
        PolicyKind::FixedWeight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Rfl => "rfl",
            PolicyKind::FairOnly => "fair_only",
            PolicyKind::RegularOnly => "regular_only",
            PolicyKind::UcbOnly => "ucb_only",
            PolicyKind::RoundRobin => "round_robin",
            PolicyKind::FixedWeight => "fixed_weight",
        }
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown policy kind `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    #[default]
    LowestIndex,
    SeededRandom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    pub alpha: f64,
    pub beta: f64,
    #[serde(flatten)]
    pub fairness: FairnessSpec,
    #[serde(default)]
    pub tie_rule: TieRule,
    /// Means used by [`PolicyKind::FixedWeight`], one per playable pair.
    /// Defaults to the environment's means.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_mu: Option<Vec<f64>>,
}

impl PolicyConfig {
    pub fn new(kind: PolicyKind, alpha: f64, beta: f64, fairness: FairnessSpec) -> Self {
        Self {
            kind,
            alpha,
            beta,
            fairness,
            tie_rule: TieRule::LowestIndex,
            known_mu: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!("alpha = {} must be >= 0", self.alpha)));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::InvalidParameter(format!("beta = {} must be >= 0", self.beta)));
        }
        self.fairness.validate()
    }

    pub fn effective_alpha(&self) -> f64 {
        match self.kind {
            PolicyKind::FairOnly => 0.0,
            _ => self.alpha,
        }
    }

    pub fn effective_beta(&self) -> f64 {
        match self.kind {
            PolicyKind::RegularOnly => 0.0,
            _ => self.beta,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FeasibleFamily {
    /// Any set of at most `s_max` arms.
    TopK { s_max: usize },
    /// At most `group_budget` groups, one sub-arm each.
    GroupedOnePerGroup { group_budget: usize },
}

impl FeasibleFamily {
    /// How many fairness units may be served per round.
    pub fn budget(&self) -> usize {
        match *self {
            FeasibleFamily::TopK { s_max } => s_max,
            FeasibleFamily::GroupedOnePerGroup { group_budget } => group_budget,
        }
    }

    pub fn validate(&self, layout: &ArmLayout) -> Result<()> {
        let budget = self.budget();
        if budget == 0 || budget > layout.units() {
            return Err(Error::InvalidParameter(format!(
                "budget {budget} must lie in 1..={}",
                layout.units()
            )));
        }
        match self {
            FeasibleFamily::TopK { .. } if layout.is_grouped() => Err(Error::InvalidParameter(
                "top_k family needs a flat environment; use grouped_one_per_group".into(),
            )),
            FeasibleFamily::GroupedOnePerGroup { .. } if !layout.is_grouped() => {
                Err(Error::InvalidParameter(
                    "grouped_one_per_group family needs a grouped environment".into(),
                ))
            }
            _ => Ok(()),
        }
    }

    /// Membership test for an activation over `layout`.
    pub fn contains(&self, layout: &ArmLayout, activation: &ActivationVector) -> bool {
        if activation.selected.len() != layout.pairs() {
            return false;
        }
        let mut served = 0;
        for u in 0..layout.units() {
            let k = layout.pair_range(u).filter(|&p| activation.selected[p]).count();
            if k > 1 {
                return false;
            }
            served += k;
        }
        served <= self.budget()
    }
}

/// Pulled indicator per playable pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivationVector {
    pub selected: Vec<bool>,
}

impl ActivationVector {
    pub fn from_pairs(pairs: usize, chosen: &[usize]) -> Self {
        let mut selected = vec![false; pairs];
        for &p in chosen {
            selected[p] = true;
        }
        Self { selected }
    }

    pub fn pulled(&self) -> impl Iterator<Item = usize> + '_ {
        self.selected
            .iter()
            .enumerate()
            .filter_map(|(i, &s)| s.then_some(i))
    }
}

/// Truncated UCB estimate; unpulled arms score 1. The log bonus is clamped at 0
/// for `t <= 1`.
pub fn ucb_weight(mean: f64, pulls: u64, t: u64) -> f64 {
    if pulls == 0 {
        return 1.0;
    }
    let log_t = if t <= 1 { 0.0 } else { (t as f64).ln() };
    (mean + (3.0 * log_t / (2.0 * pulls as f64)).sqrt()).min(1.0)
}

/// Score of a unit whose optimistic reward estimate is `estimate`.
pub fn unit_weight(state: &ArmState, estimate: f64, config: &PolicyConfig) -> f64 {
    match config.kind {
        PolicyKind::UcbOnly => estimate,
        PolicyKind::RoundRobin => 0.0,
        _ => {
            state.queue
                + config.effective_alpha() * state.tslr as f64
                + config.effective_beta() * estimate
        }
    }
}

/// Flat weights `Q + alpha Z + beta w`. `known_mu` replaces `w` for
/// [`PolicyKind::FixedWeight`].
pub fn rfl_weights(
    states: &[ArmState],
    config: &PolicyConfig,
    t: u64,
    known_mu: Option<&[f64]>,
) -> Vec<f64> {
    states
        .iter()
        .enumerate()
        .map(|(n, s)| {
            let estimate = match (config.kind, known_mu) {
                (PolicyKind::FixedWeight, Some(mu)) => mu[n],
                _ => ucb_weight(s.mean(), s.pulls(), t),
            };
            unit_weight(s, estimate, config)
        })
        .collect()
}

/// Group score using the best sub-arm estimate; ties go to the lowest sub-arm.
pub fn group_weight(
    group_state: &ArmState,
    sub_arm_estimates: &[f64],
    config: &PolicyConfig,
) -> (f64, usize) {
    let best = argmax_lowest(sub_arm_estimates);
    (
        unit_weight(group_state, sub_arm_estimates[best], config),
        best,
    )
}

fn argmax_lowest(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Breaks weight ties between units.
#[derive(Clone, Debug)]
pub enum TieBreaker {
    LowestIndex,
    Seeded(RngStream),
}

impl TieBreaker {
    pub fn new(rule: TieRule, seed: u64, units: usize) -> Self {
        match rule {
            TieRule::LowestIndex => TieBreaker::LowestIndex,
            TieRule::SeededRandom => {
                TieBreaker::Seeded(RngStream::new(seed ^ 0x7469_655f_6272_6b72, units))
            }
        }
    }

    fn keys(&mut self, t: u64, units: usize, out: &mut Vec<f64>) {
        out.clear();
        match self {
            TieBreaker::LowestIndex => out.extend((0..units).map(|u| u as f64)),
            TieBreaker::Seeded(rng) => out.extend((0..units).map(|u| rng.uniform(u, t))),
        }
    }
}

/// The `budget` highest-weight indices, ordered by weight then tie key.
pub fn select_top(weights: &[f64], budget: usize, keys: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| by_weight_then_key(weights, keys, a, b));
    order.truncate(budget.min(weights.len()));
    order
}

fn by_weight_then_key(weights: &[f64], keys: &[f64], a: usize, b: usize) -> Ordering {
    weights[b]
        .total_cmp(&weights[a])
        .then(keys[a].total_cmp(&keys[b]))
        .then(a.cmp(&b))
}

/// Maximum-weight member of `family`. `best_sub_arms[u]` is the sub-arm a
/// selected unit plays (all zero for flat layouts).
pub fn select_activation(
    weights: &[f64],
    best_sub_arms: &[usize],
    layout: &ArmLayout,
    family: &FeasibleFamily,
    tie: &mut TieBreaker,
    t: u64,
) -> ActivationVector {
    let mut keys = Vec::with_capacity(weights.len());
    tie.keys(t, weights.len(), &mut keys);
    let units = select_top(weights, family.budget(), &keys);
    let pairs: Vec<usize> = units
        .iter()
        .map(|&u| layout.pair_index(u, best_sub_arms[u]))
        .collect();
    ActivationVector::from_pairs(layout.pairs(), &pairs)
}

/// Outcome of one scheduled round.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundLog {
    pub t: u64,
    /// Pulled pair indices, ascending.
    pub selected: Vec<usize>,
    /// Realized environment outcome per pair (pulled or not).
    pub outcomes: Vec<bool>,
    /// Whether each fairness unit received a reward this round.
    pub unit_rewards: Vec<bool>,
    /// Queue lengths after the update.
    pub queues: Vec<f64>,
    /// TSLR counters after the update.
    pub tslrs: Vec<u64>,
}

/// A single trajectory's policy state.
#[derive(Clone, Debug)]
pub struct Scheduler {
    config: PolicyConfig,
    family: FeasibleFamily,
    layout: ArmLayout,
    units: Vec<ArmState>,
    pair_stats: Vec<PullStats>,
    known_mu: Option<Vec<f64>>,
    tie: TieBreaker,
    weights: Vec<f64>,
    best_sub: Vec<usize>,
    estimates: Vec<f64>,
    keys: Vec<f64>,
    pulled: Vec<bool>,
}

impl Scheduler {
    /// `known_mu` (one mean per pair) is required by [`PolicyKind::FixedWeight`]
    /// and ignored otherwise. `seed` only feeds seeded tie-breaking.
    pub fn new(
        config: PolicyConfig,
        family: FeasibleFamily,
        layout: ArmLayout,
        known_mu: Option<Vec<f64>>,
        seed: u64,
    ) -> Result<Self> {
        config.validate()?;
        family.validate(&layout)?;
        if config.fairness.len() != layout.units() {
            return Err(Error::DimensionMismatch {
                what: "lambda",
                got: config.fairness.len(),
                expected: layout.units(),
            });
        }
        let known_mu = match config.kind {
            PolicyKind::FixedWeight => {
                let mu = known_mu.ok_or_else(|| {
                    Error::InvalidParameter("fixed_weight policy needs known means".into())
                })?;
                if mu.len() != layout.pairs() {
                    return Err(Error::DimensionMismatch {
                        what: "known_mu",
                        got: mu.len(),
                        expected: layout.pairs(),
                    });
                }
                Some(mu)
            }
            _ => None,
        };
        let tie = TieBreaker::new(config.tie_rule, seed, layout.units());
        let (u, p) = (layout.units(), layout.pairs());
        Ok(Self {
            config,
            family,
            units: vec![ArmState::new(); u],
            pair_stats: vec![PullStats::default(); p],
            known_mu,
            tie,
            weights: vec![0.0; u],
            best_sub: vec![0; u],
            estimates: Vec::new(),
            keys: Vec::with_capacity(u),
            pulled: vec![false; p],
            layout,
        })
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.config
    }

    pub fn layout(&self) -> &ArmLayout {
        &self.layout
    }

    pub fn units(&self) -> &[ArmState] {
        &self.units
    }

    pub fn pair_stats(&self) -> &[PullStats] {
        &self.pair_stats
    }

    /// Unit weights for round `t`, also refreshing each unit's best sub-arm.
    pub fn weights(&mut self, t: u64) -> &[f64] {
        for u in 0..self.layout.units() {
            self.estimates.clear();
            for p in self.layout.pair_range(u) {
                let est = match &self.known_mu {
                    Some(mu) => mu[p],
                    None => {
                        let s = &self.pair_stats[p];
                        ucb_weight(s.mean(), s.pulls, t)
                    }
                };
                self.estimates.push(est);
            }
            let (w, best) = group_weight(&self.units[u], &self.estimates, &self.config);
            self.weights[u] = w;
            self.best_sub[u] = best;
        }
        &self.weights
    }

    fn choose(&mut self, t: u64, chosen: &mut Vec<usize>) {
        chosen.clear();
        let budget = self.family.budget();
        let units = self.layout.units();
        self.weights(t);
        if self.config.kind == PolicyKind::RoundRobin {
            let start = (t as usize % units) * budget;
            chosen.extend((0..budget).map(|i| (start + i) % units));
        } else {
            self.tie.keys(t, units, &mut self.keys);
            let (w, k) = (&self.weights, &self.keys);
            chosen.extend(0..units);
            chosen.sort_by(|&a, &b| by_weight_then_key(w, k, a, b));
            chosen.truncate(budget);
        }
        for u in chosen.iter_mut() {
            *u = self.layout.pair_index(*u, self.best_sub[*u]);
        }
        chosen.sort_unstable();
    }

    /// Plays round `t` against realized `outcomes` (one per pair), writing the
    /// record into `log`. Fails if the queue/TSLR coupling breaks.
    pub fn step(&mut self, outcomes: &[bool], t: u64, log: &mut RoundLog) -> Result<()> {
        if outcomes.len() != self.layout.pairs() {
            return Err(Error::DimensionMismatch {
                what: "outcomes",
                got: outcomes.len(),
                expected: self.layout.pairs(),
            });
        }
        let mut chosen = std::mem::take(&mut log.selected);
        self.choose(t, &mut chosen);
        self.pulled.iter_mut().for_each(|p| *p = false);
        for &p in &chosen {
            self.pulled[p] = true;
        }
        for (p, stats) in self.pair_stats.iter_mut().enumerate() {
            stats.record(self.pulled[p], outcomes[p]);
        }
        log.unit_rewards.clear();
        log.queues.clear();
        log.tslrs.clear();
        let eps = self.config.fairness.epsilon;
        for (u, state) in self.units.iter_mut().enumerate() {
            let range = self.layout.pair_range(u);
            let played = range.clone().find(|&p| self.pulled[p]);
            let (pulled, reward) = played.map_or((false, false), |p| (true, outcomes[p]));
            let lambda = self.config.fairness.lambda[u];
            state.advance(lambda, eps, pulled, reward);
            if !lemma1_holds(state, lambda, LEMMA1_TOLERANCE) {
                return Err(Error::InvariantViolation {
                    unit: u,
                    t,
                    queue: state.queue,
                    tslr: state.tslr,
                    lambda,
                });
            }
            log.unit_rewards.push(pulled && reward);
            log.queues.push(state.queue);
            log.tslrs.push(state.tslr);
        }
        log.t = t;
        log.selected = chosen;
        log.outcomes.clear();
        log.outcomes.extend_from_slice(outcomes);
        Ok(())
    }

    pub fn policy_step(&mut self, outcomes: &[bool], t: u64) -> Result<RoundLog> {
        let mut log = RoundLog::default();
        self.step(outcomes, t, &mut log)?;
        Ok(log)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fairness(lambda: &[f64]) -> FairnessSpec {
        FairnessSpec::new(lambda.to_vec(), 0.001).unwrap()
    }

    #[test]
    fn ucb_examples() {
        assert_eq!(ucb_weight(0.2, 0, 500), 1.0);
        assert_eq!(ucb_weight(0.9, 2, 10), 1.0);
        assert_abs_diff_eq!(ucb_weight(0.5, 150, 100), 0.71459, epsilon = 1e-4);
        // Clamped bonus at t in {0, 1}.
        assert_eq!(ucb_weight(0.4, 3, 0), 0.4);
        assert_eq!(ucb_weight(0.4, 3, 1), 0.4);
    }

    #[test]
    fn rfl_weight_examples() {
        let s = ArmState {
            queue: 2.0,
            tslr: 3,
            ..ArmState::new()
        };
        let cfg = PolicyConfig::new(PolicyKind::Rfl, 1.0, 10.0, fairness(&[0.1]));
        assert_abs_diff_eq!(unit_weight(&s, 0.5, &cfg), 10.0, epsilon = 1e-12);

        let cfg = PolicyConfig::new(PolicyKind::Rfl, 0.0, 0.0, fairness(&[0.1, 0.1]));
        let states = [s, ArmState { queue: 0.7, tslr: 9, ..ArmState::new() }];
        assert_eq!(rfl_weights(&states, &cfg, 5, None), vec![2.0, 0.7]);

        let cfg = PolicyConfig::new(PolicyKind::Rfl, 1.0, 1.0, fairness(&[0.1; 3]));
        assert_eq!(rfl_weights(&[ArmState::new(); 3], &cfg, 0, None), vec![1.0; 3]);

        let cfg = PolicyConfig::new(PolicyKind::FixedWeight, 1.0, 10.0, fairness(&[0.1]));
        assert_abs_diff_eq!(
            rfl_weights(&[s], &cfg, 5, Some(&[0.5]))[0],
            10.0,
            epsilon = 1e-12
        );
        let cfg = PolicyConfig::new(PolicyKind::UcbOnly, 1.0, 10.0, fairness(&[0.1]));
        assert_eq!(rfl_weights(&[s], &cfg, 5, None), vec![1.0]);
        let cfg = PolicyConfig::new(PolicyKind::RegularOnly, 1.0, 10.0, fairness(&[0.1]));
        assert_eq!(rfl_weights(&[s], &cfg, 5, None), vec![5.0]);
        let cfg = PolicyConfig::new(PolicyKind::FairOnly, 1.0, 10.0, fairness(&[0.1]));
        assert_eq!(rfl_weights(&[s], &cfg, 5, None), vec![12.0]);
    }

    #[test]
    fn group_weight_examples() {
        let s = ArmState {
            queue: 1.0,
            tslr: 2,
            ..ArmState::new()
        };
        let cfg = PolicyConfig::new(PolicyKind::Rfl, 1.0, 2.0, fairness(&[0.1]));
        let (w, m) = group_weight(&s, &[0.3, 0.9, 0.9], &cfg);
        assert_abs_diff_eq!(w, 4.8, epsilon = 1e-12);
        assert_eq!(m, 1);

        let cfg = PolicyConfig::new(PolicyKind::Rfl, 1.0, 0.0, fairness(&[0.1]));
        assert_eq!(group_weight(&s, &[0.3, 0.9, 0.2], &cfg), (3.0, 1));

        let cfg = PolicyConfig::new(PolicyKind::Rfl, 1.0, 2.0, fairness(&[0.1]));
        let (w, m) = group_weight(&s, &[0.4], &cfg);
        assert_eq!(m, 0);
        assert_eq!(w, unit_weight(&s, 0.4, &cfg));
    }

    #[test]
    fn selection_examples() {
        let l = ArmLayout::flat(3);
        let fam = FeasibleFamily::TopK { s_max: 2 };
        let act = select_activation(&[3.0, 1.0, 2.5], &[0; 3], &l, &fam, &mut TieBreaker::LowestIndex, 0);
        assert_eq!(act.pulled().collect::<Vec<_>>(), vec![0, 2]);

        let l = ArmLayout::flat(2);
        let fam = FeasibleFamily::TopK { s_max: 1 };
        let act = select_activation(&[1.0, 1.0], &[0; 2], &l, &fam, &mut TieBreaker::LowestIndex, 0);
        assert_eq!(act.pulled().collect::<Vec<_>>(), vec![0]);

        // All-zero weights still use the full budget.
        let l = ArmLayout::flat(4);
        let fam = FeasibleFamily::TopK { s_max: 3 };
        let act = select_activation(&[0.0; 4], &[0; 4], &l, &fam, &mut TieBreaker::LowestIndex, 0);
        assert_eq!(act.pulled().collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn seeded_ties_are_reproducible_and_vary() {
        let mut a = TieBreaker::new(TieRule::SeededRandom, 3, 4);
        let mut b = TieBreaker::new(TieRule::SeededRandom, 3, 4);
        let l = ArmLayout::flat(4);
        let fam = FeasibleFamily::TopK { s_max: 1 };
        let picks: Vec<_> = (0..64)
            .map(|t| select_activation(&[1.0; 4], &[0; 4], &l, &fam, &mut a, t))
            .collect();
        for (t, p) in picks.iter().enumerate() {
            assert_eq!(*p, select_activation(&[1.0; 4], &[0; 4], &l, &fam, &mut b, t as u64));
        }
        let distinct: std::collections::BTreeSet<_> =
            picks.iter().map(|p| p.pulled().next().unwrap()).collect();
        assert!(distinct.len() > 1);
    }

    #[test]
    fn single_arm_is_always_pulled() {
        let cfg = PolicyConfig::new(PolicyKind::Rfl, 1.0, 1.0, fairness(&[0.5]));
        let mut s = Scheduler::new(cfg, FeasibleFamily::TopK { s_max: 1 }, ArmLayout::flat(1), None, 0).unwrap();
        for t in 0..50 {
            let log = s.policy_step(&[t % 3 == 0], t).unwrap();
            assert_eq!(log.selected, vec![0]);
        }
        assert_eq!(s.units()[0].pulls(), 50);
    }

    #[test]
    fn step_updates_idle_arms() {
        let cfg = PolicyConfig::new(PolicyKind::Rfl, 1.0, 1.0, fairness(&[0.2, 0.3]));
        let mut s = Scheduler::new(cfg, FeasibleFamily::TopK { s_max: 1 }, ArmLayout::flat(2), None, 0).unwrap();
        let log = s.policy_step(&[true, true], 0).unwrap();
        assert_eq!(log.selected, vec![0]);
        assert_eq!(log.unit_rewards, vec![true, false]);
        assert_eq!(log.tslrs, vec![1, 1]);
        assert_eq!(log.queues[0], 0.0);
        assert_abs_diff_eq!(log.queues[1], 0.301, epsilon = 1e-12);
        assert_eq!(s.units()[1].pulls(), 0);
        // Arm 1 now has the larger queue: weights 0 + 1 + 1 vs 0.301 + 1 + 1.
        let log = s.policy_step(&[true, false], 1).unwrap();
        assert_eq!(log.selected, vec![1]);
        assert_eq!(log.unit_rewards, vec![false, false]);
        assert_eq!(s.units()[1].pulls(), 1);
        assert_eq!(s.units()[1].mean(), 0.0);
    }

    #[test]
    fn round_robin_cycles() {
        let cfg = PolicyConfig::new(PolicyKind::RoundRobin, 0.0, 0.0, fairness(&[0.1; 5]));
        let mut s = Scheduler::new(cfg, FeasibleFamily::TopK { s_max: 2 }, ArmLayout::flat(5), None, 0).unwrap();
        let picks: Vec<_> = (0..5).map(|t| s.policy_step(&[true; 5], t).unwrap().selected).collect();
        assert_eq!(picks, vec![vec![0, 1], vec![2, 3], vec![0, 4], vec![1, 2], vec![3, 4]]);
    }

    #[test]
    fn grouped_scheduler_plays_best_sub_arm() {
        let cfg = PolicyConfig::new(PolicyKind::FixedWeight, 1.0, 2.0, fairness(&[0.1, 0.1]));
        let layout = ArmLayout::grouped(vec![2, 2]).unwrap();
        let fam = FeasibleFamily::GroupedOnePerGroup { group_budget: 1 };
        let mu = vec![0.3, 0.6, 0.9, 0.2];
        let mut s = Scheduler::new(cfg, fam, layout, Some(mu), 0).unwrap();
        let w = s.weights(0).to_vec();
        assert_eq!(w, vec![1.2, 1.8]);
        let log = s.policy_step(&[true; 4], 0).unwrap();
        assert_eq!(log.selected, vec![2]);
        assert_eq!(log.unit_rewards, vec![false, true]);
        assert_eq!(s.pair_stats()[2].pulls, 1);
    }

    #[test]
    fn scheduler_rejects_bad_shapes() {
        let cfg = PolicyConfig::new(PolicyKind::Rfl, 1.0, 1.0, fairness(&[0.1; 2]));
        let flat = ArmLayout::flat(3);
        assert!(Scheduler::new(cfg.clone(), FeasibleFamily::TopK { s_max: 1 }, flat.clone(), None, 0).is_err());
        let cfg3 = PolicyConfig::new(PolicyKind::Rfl, 1.0, 1.0, fairness(&[0.1; 3]));
        assert!(Scheduler::new(cfg3.clone(), FeasibleFamily::TopK { s_max: 4 }, flat.clone(), None, 0).is_err());
        assert!(Scheduler::new(
            cfg3.clone(),
            FeasibleFamily::GroupedOnePerGroup { group_budget: 1 },
            flat.clone(),
            None,
            0
        )
        .is_err());
        let fixed = PolicyConfig { kind: PolicyKind::FixedWeight, ..cfg3 };
        assert!(Scheduler::new(fixed, FeasibleFamily::TopK { s_max: 1 }, flat, None, 0).is_err());
    }
}
