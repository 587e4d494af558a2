//! Two arms with deterministic rewards scheduled by known means. The weaker arm
//! settles into a fixed pull period that matches `tau0`.
//!
//! cargo run --release --example fixed_weight_period

use rfl::bounds::tau0;
use rfl::harness::{presets, Simulation};

fn main() -> rfl::Result<()> {
    let config = presets::remark3().config.with_horizon(10_100);
    let sim = Simulation::new(&config)?;
    let lambda = &config.policy.fairness.lambda;
    let expected = tau0(config.policy.alpha, config.policy.beta, 0.8, 0.5, lambda[1]);

    let mut pulls = Vec::new();
    sim.simulate(0, |log, _| {
        if log.selected == [1] {
            pulls.push(log.t);
        }
    })?;
    let gaps: Vec<u64> = pulls
        .windows(2)
        .filter(|w| w[0] > 100)
        .map(|w| w[1] - w[0])
        .collect();
    let hits = gaps.iter().filter(|&&g| g == expected).count();
    println!("tau0 = {expected}");
    println!("first pulls of arm 2: {:?}", &pulls[..12.min(pulls.len())]);
    println!("gaps after warmup: {hits}/{} equal tau0", gaps.len());
    Ok(())
}
