//! The stationary benchmark: maximal tightness, the greedy marginal solution,
//! and a cross-check against exhaustive vertex enumeration on a small instance.

use rfl::harness::presets::{synthetic_lambda, SYNTHETIC_MU};
use rfl::oracle::{brute_force_lp, max_tightness, solve_marginal_lp};

fn main() -> rfl::Result<()> {
    let lambda = synthetic_lambda();
    let delta_star = max_tightness(&SYNTHETIC_MU, &lambda, 1)?;
    println!("six-arm instance: delta* = {delta_star:.6}");
    for delta in [0.0, 0.001, delta_star / 2.0, delta_star] {
        let sol = solve_marginal_lp(&SYNTHETIC_MU, &lambda, delta, 1)?;
        let p: Vec<String> = sol.marginals.iter().map(|x| format!("{x:.4}")).collect();
        println!("  delta={delta:.6} rate={:.6} p=[{}]", sol.optimal_rate, p.join(", "));
    }

    let mu = [0.9, 0.6, 0.4, 0.7];
    let lambda = [0.1, 0.2, 0.15, 0.05];
    for s_max in 1..=2 {
        let greedy = solve_marginal_lp(&mu, &lambda, 0.01, s_max)?.optimal_rate;
        let exact = brute_force_lp(&mu, &lambda, 0.01, s_max)?;
        println!("four arms, s_max={s_max}: greedy {greedy:.6}, enumeration {exact:?}");
    }
    Ok(())
}
