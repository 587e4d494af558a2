//! The stationary randomized benchmark.
//!
//! With known means, the best fair stationary policy solves
//! `max sum_S q(S) sum_n mu_n S_n` subject to `lambda_n + delta <= sum_S q(S) S_n mu_n`.
//! For the top-k family the LP only depends on the marginals `p_n = E[S_n]`,
//! which are feasible iff `p_n <= 1` and `sum p_n <= s_max`, so it collapses
//! to a fractional knapsack solved greedily by [`solve_marginal_lp`].
//! [`brute_force_lp`] solves the original LP over set distributions by
//! exhaustive vertex enumeration and serves as its independent check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack for floating comparisons on marginal budgets.
const BUDGET_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSolution {
    /// `E[S*_n]` per arm.
    pub marginals: Vec<f64>,
    pub optimal_rate: f64,
    /// The tightness the LP was solved at.
    pub delta: f64,
    pub delta_star: f64,
    pub feasible: bool,
}

fn check_inputs(mu: &[f64], lambda: &[f64]) -> Result<()> {
    if mu.len() != lambda.len() {
        return Err(Error::DimensionMismatch {
            what: "lambda",
            got: lambda.len(),
            expected: mu.len(),
        });
    }
    if mu.is_empty() {
        return Err(Error::InvalidParameter("no arms".into()));
    }
    if mu.iter().any(|m| !(*m > 0.0 && *m <= 1.0)) {
        return Err(Error::InvalidParameter("means must lie in (0, 1]".into()));
    }
    if lambda.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
        return Err(Error::InvalidParameter("fairness targets must be >= 0".into()));
    }
    Ok(())
}

/// Largest `delta` for which the fairness constraints are satisfiable. A
/// non-positive result means the targets are infeasible.
pub fn max_tightness(mu: &[f64], lambda: &[f64], s_max: usize) -> Result<f64> {
    check_inputs(mu, lambda)?;
    if s_max == 0 {
        return Err(Error::InvalidParameter("s_max must be positive".into()));
    }
    let per_arm = mu
        .iter()
        .zip(lambda)
        .map(|(m, l)| m - l)
        .fold(f64::INFINITY, f64::min);
    let budget = s_max.min(mu.len()) as f64;
    let load: f64 = mu.iter().zip(lambda).map(|(m, l)| l / m).sum();
    let inv: f64 = mu.iter().map(|m| 1.0 / m).sum();
    Ok(per_arm.min((budget - load) / inv))
}

/// Optimal marginals at tightness `delta`: every arm at its lower bound
/// `(lambda_n + delta) / mu_n`, then the remaining budget poured into the
/// highest-mean arms (lowest index first on ties), capped at 1 each.
pub fn solve_marginal_lp(
    mu: &[f64],
    lambda: &[f64],
    delta: f64,
    s_max: usize,
) -> Result<OracleSolution> {
    let delta_star = max_tightness(mu, lambda, s_max)?;
    if delta > delta_star + BUDGET_SLACK {
        return Err(Error::TightnessTooLarge { delta, delta_star });
    }
    let mut p: Vec<f64> = mu
        .iter()
        .zip(lambda)
        .map(|(m, l)| ((l + delta) / m).clamp(0.0, 1.0))
        .collect();
    let budget = s_max.min(mu.len()) as f64;
    let mut residual = (budget - p.iter().sum::<f64>()).max(0.0);
    let mut order: Vec<usize> = (0..mu.len()).collect();
    order.sort_by(|&a, &b| mu[b].total_cmp(&mu[a]).then(a.cmp(&b)));
    for n in order {
        if residual <= 0.0 {
            break;
        }
        let add = (1.0 - p[n]).min(residual);
        p[n] += add;
        residual -= add;
    }
    let optimal_rate = mu.iter().zip(&p).map(|(m, q)| m * q).sum();
    Ok(OracleSolution {
        marginals: p,
        optimal_rate,
        delta,
        delta_star,
        feasible: delta_star > 0.0,
    })
}

/// Largest arm count [`brute_force_lp`] accepts.
pub const BRUTE_FORCE_MAX_ARMS: usize = 4;

/// Optimal LP value over distributions on all arm sets of size `<= s_max`, by
/// enumerating every basic solution of the standard-form LP. `None` when no
/// distribution meets the constraints.
pub fn brute_force_lp(
    mu: &[f64],
    lambda: &[f64],
    delta: f64,
    s_max: usize,
) -> Result<Option<f64>> {
    check_inputs(mu, lambda)?;
    let n = mu.len();
    if n > BRUTE_FORCE_MAX_ARMS {
        return Err(Error::InvalidParameter(format!(
            "brute force is limited to {BRUTE_FORCE_MAX_ARMS} arms, got {n}"
        )));
    }
    let sets: Vec<u32> = (0..1u32 << n)
        .filter(|s| s.count_ones() as usize <= s_max)
        .collect();

    // Rows: sum_S q_S = 1, then sum_S q_S S_n mu_n - slack_n = lambda_n + delta.
    // Columns: one per set, then one slack per arm.
    let rows = n + 1;
    let cols = sets.len() + n;
    let column = |c: usize| -> Vec<f64> {
        let mut v = vec![0.0; rows];
        if c < sets.len() {
            v[0] = 1.0;
            for a in 0..n {
                if sets[c] & (1 << a) != 0 {
                    v[a + 1] = mu[a];
                }
            }
        } else {
            v[c - sets.len() + 1] = -1.0;
        }
        v
    };
    let cost = |c: usize| -> f64 {
        if c < sets.len() {
            (0..n).filter(|a| sets[c] & (1 << a) != 0).map(|a| mu[a]).sum()
        } else {
            0.0
        }
    };
    let columns: Vec<Vec<f64>> = (0..cols).map(column).collect();
    let mut rhs = vec![1.0];
    rhs.extend(lambda.iter().map(|l| l + delta));

    let mut best: Option<f64> = None;
    let mut basis: Vec<usize> = (0..rows).collect();
    loop {
        if let Some(x) = solve_basis(&columns, &basis, &rhs) {
            if x.iter().all(|v| *v >= -1e-9) {
                let value: f64 = basis.iter().zip(&x).map(|(&c, v)| cost(c) * v).sum();
                best = Some(best.map_or(value, |b: f64| b.max(value)));
            }
        }
        if !next_combination(&mut basis, cols) {
            break;
        }
    }
    Ok(best)
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Gaussian elimination with partial pivoting; `None` for singular bases.
fn solve_basis(columns: &[Vec<f64>], basis: &[usize], rhs: &[f64]) -> Option<Vec<f64>> {
    let m = rhs.len();
    let mut a: Vec<Vec<f64>> = (0..m)
        .map(|r| {
            let mut row: Vec<f64> = basis.iter().map(|&c| columns[c][r]).collect();
            row.push(rhs[r]);
            row
        })
        .collect();
    for col in 0..m {
        let pivot = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            let f = row[col] / pivot_row[col];
            if r != col && f != 0.0 {
                for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * p;
                }
            }
        }
    }
    Some((0..m).map(|r| a[r][m] / a[r][r]).collect())
}

/// Flat benchmark means for grouped environments: each group's best sub-arm.
pub fn grouped_benchmark_means(mu: &[Vec<f64>]) -> Vec<f64> {
    mu.iter()
        .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect()
}
