//! Closed-form performance guarantees and Lyapunov diagnostics.
//!
//! The constants here are valid but very loose; on realistic instances `g0`
//! lands around 1e13. They are evaluated verbatim in double precision.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::ArmState;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub n: usize,
    pub s_max: usize,
    pub mu_min: f64,
    pub mu_max: f64,
    pub lambda_min: f64,
    /// Tightness of the fairness constraints (the oracle's maximal one by default).
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub horizon: u64,
}

impl BoundInputs {
    /// Required by the zero-violation and regularity guarantees.
    pub fn epsilon_within_half_delta(&self) -> bool {
        self.epsilon <= self.delta / 2.0
    }

    /// Required by the regret guarantee.
    pub fn epsilon_within_delta(&self) -> bool {
        self.epsilon <= self.delta
    }

    fn require_half_delta(&self) -> Result<()> {
        if self.epsilon_within_half_delta() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "epsilon <= delta/2 fails: epsilon = {}, delta/2 = {}",
                self.epsilon,
                self.delta / 2.0
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop1Constants {
    /// Absolute per-round bound on the Lyapunov drift.
    pub d: f64,
    /// Level above which the expected drift is negative.
    pub u: f64,
    pub theta: f64,
    pub v0: f64,
    pub g0: f64,
    /// `g0 / epsilon`: rounds after which cumulative violation is zero.
    pub t0_bound: f64,
}

fn finite(x: f64, what: &'static str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(what))
    }
}

pub fn drift_bound_d(inputs: &BoundInputs) -> f64 {
    (12.0 * inputs.alpha + 1.0) * inputs.n as f64 / (inputs.lambda_min * inputs.mu_min)
}

pub fn drift_level_u(inputs: &BoundInputs) -> f64 {
    let n = inputs.n as f64;
    8.0 * n * n * (4.0 * inputs.alpha + 3.0 * inputs.beta + 2.0)
        / (inputs.delta * inputs.mu_min * inputs.mu_min)
}

/// Expected drift bound `-delta mu_min / (16 N)` above level `U`.
pub fn negative_drift(inputs: &BoundInputs) -> f64 {
    -inputs.delta * inputs.mu_min / (16.0 * inputs.n as f64)
}

pub fn prop1_constants(inputs: &BoundInputs) -> Result<Prop1Constants> {
    inputs.require_half_delta()?;
    let n = inputs.n as f64;
    let dm = inputs.delta * inputs.mu_min;
    let d = finite(drift_bound_d(inputs), "D")?;
    let u = finite(drift_level_u(inputs), "U")?;
    let theta = 3.0 * dm / (48.0 * n * d * d + dm * d);
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::NonFinite("theta"));
    }
    let v0 = finite(32.0 * n / (dm * theta), "v0")?;
    let g0 = finite(n.sqrt() * (v0.ln_1p() / theta + d + u), "g0")?;
    Ok(Prop1Constants {
        d,
        u,
        theta,
        v0,
        g0,
        t0_bound: finite(g0 / inputs.epsilon, "t0")?,
    })
}

/// Bound on the running average of total expected TSLR. For `alpha = 0` only
/// the `(N + g0) / lambda_min` branch applies.
pub fn prop2_bound(inputs: &BoundInputs, g0: f64) -> f64 {
    let first = (inputs.n as f64 + g0) / inputs.lambda_min;
    if inputs.alpha > 0.0 {
        first.min(prop2_second_branch(inputs))
    } else {
        first
    }
}

pub fn prop2_second_branch(inputs: &BoundInputs) -> f64 {
    let n = inputs.n as f64;
    n * n / (inputs.delta * inputs.mu_min) * (1.0 + (3.0 * inputs.beta + 4.0) / inputs.alpha)
}

pub fn prop3_bound(inputs: &BoundInputs) -> f64 {
    let linear = inputs.s_max as f64 * inputs.mu_max * inputs.horizon as f64;
    if inputs.beta > 0.0 {
        linear.min(prop3_second_branch(inputs))
    } else {
        linear
    }
}

pub fn prop3_second_branch(inputs: &BoundInputs) -> f64 {
    let n = inputs.n as f64;
    let t = inputs.horizon as f64;
    let log_t = if inputs.horizon <= 1 { 0.0 } else { t.ln() };
    n * t / inputs.mu_min * ((inputs.alpha + 1.0) / inputs.beta)
        + 2.0 * (6.0 * n * inputs.s_max as f64 * t * log_t).sqrt()
        + n * (1.0 + 5.0 * PI * PI / 12.0)
}

/// Rounds between pulls of the weaker of two arms under known means.
pub fn tau0(alpha: f64, beta: f64, mu1: f64, mu2: f64, lambda2: f64) -> u64 {
    let raw = (alpha + beta * (mu1 - mu2)) / (lambda2 + alpha);
    let snapped = raw - 1e-9 * raw.abs().max(1.0);
    (snapped.ceil() as u64).max(1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub inputs: BoundInputs,
    pub epsilon_within_half_delta: bool,
    pub epsilon_within_delta: bool,
    pub d_alpha: f64,
    pub u_alpha_beta: f64,
    pub theta_alpha: Option<f64>,
    pub v0_alpha: Option<f64>,
    pub g0: Option<f64>,
    pub t0_bound: Option<f64>,
    pub regularity_bound: Option<f64>,
    pub regret_bound: Option<f64>,
    /// Only defined for two-arm instances.
    pub tau0: Option<u64>,
}

/// Evaluates every guarantee whose precondition holds. `two_arm` carries
/// `(mu1, mu2, lambda2)` for the stronger/weaker arm pair when `N = 2`.
pub fn bound_report(inputs: &BoundInputs, two_arm: Option<(f64, f64, f64)>) -> Result<BoundReport> {
    let p1 = if inputs.epsilon_within_half_delta() {
        Some(prop1_constants(inputs)?)
    } else {
        None
    };
    Ok(BoundReport {
        inputs: inputs.clone(),
        epsilon_within_half_delta: inputs.epsilon_within_half_delta(),
        epsilon_within_delta: inputs.epsilon_within_delta(),
        d_alpha: drift_bound_d(inputs),
        u_alpha_beta: drift_level_u(inputs),
        theta_alpha: p1.map(|c| c.theta),
        v0_alpha: p1.map(|c| c.v0),
        g0: p1.map(|c| c.g0),
        t0_bound: p1.map(|c| c.t0_bound),
        regularity_bound: p1.map(|c| prop2_bound(inputs, c.g0)),
        regret_bound: inputs.epsilon_within_delta().then(|| prop3_bound(inputs)),
        tau0: two_arm
            .filter(|(m1, m2, _)| m1 > m2)
            .map(|(m1, m2, l2)| tau0(inputs.alpha, inputs.beta, m1, m2, l2)),
    })
}

/// `sqrt(sum Q^2 / mu + 4 alpha sum Z / mu)`.
pub fn lyapunov_v(states: &[ArmState], alpha: f64, mu: &[f64]) -> f64 {
    lyapunov_v1(states, alpha, mu).sqrt()
}

/// Squared form `V^2`.
pub fn lyapunov_v1(states: &[ArmState], alpha: f64, mu: &[f64]) -> f64 {
    states
        .iter()
        .zip(mu)
        .map(|(s, m)| (s.queue * s.queue + 4.0 * alpha * s.tslr as f64) / m)
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    /// Conditioning level in use (the analytic `U` unless overridden).
    pub level: f64,
    pub level_overridden: bool,
    pub absolute_bound: f64,
    pub expected_drift_bound: f64,
    pub steps: usize,
    pub conditioned_steps: usize,
    pub condition_reached: bool,
    pub max_abs_step: f64,
    pub absolute_bound_violations: usize,
    pub mean_drift: Option<f64>,
    pub mean_drift_stderr: Option<f64>,
}

impl DriftReport {
    pub fn absolute_bound_holds(&self) -> bool {
        self.absolute_bound_violations == 0
    }
}

/// Checks `|V(t+1) - V(t)| <= D` on every step with `V(t) >= U` and estimates
/// the conditional mean drift there. `level_override` replaces `U` so the
/// condition is reachable in short runs.
pub fn drift_diagnostics(
    v: &[f64],
    inputs: &BoundInputs,
    level_override: Option<f64>,
) -> DriftReport {
    let level = level_override.unwrap_or_else(|| drift_level_u(inputs));
    let d = drift_bound_d(inputs);
    let steps: Vec<f64> = v
        .windows(2)
        .filter(|w| w[0] >= level)
        .map(|w| w[1] - w[0])
        .collect();
    let k = steps.len();
    let (mean, se) = if k == 0 {
        (None, None)
    } else {
        let m = steps.iter().sum::<f64>() / k as f64;
        let se = if k > 1 {
            let var = steps.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (k - 1) as f64;
            (var / k as f64).sqrt()
        } else {
            0.0
        };
        (Some(m), Some(se))
    };
    DriftReport {
        level,
        level_overridden: level_override.is_some(),
        absolute_bound: d,
        expected_drift_bound: negative_drift(inputs),
        steps: v.len().saturating_sub(1),
        conditioned_steps: k,
        condition_reached: k > 0,
        max_abs_step: steps.iter().fold(0.0, |a, x| a.max(x.abs())),
        absolute_bound_violations: steps.iter().filter(|x| x.abs() > d).count(),
        mean_drift: mean,
        mean_drift_stderr: se,
    }
}

/// `(sum of one-step differences, last - first)` of a series.
pub fn telescoping_sums(series: &[f64]) -> (f64, f64) {
    let sum = series.windows(2).map(|w| w[1] - w[0]).sum();
    let ends = match (series.first(), series.last()) {
        (Some(a), Some(b)) => b - a,
        _ => 0.0,
    };
    (sum, ends)
}
