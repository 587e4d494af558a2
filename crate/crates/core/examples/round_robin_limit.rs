use rfl::harness::{presets, Simulation};

// With a dominant TSLR weight and rewards that never fail, the scheduler
// serves arms in a fixed cycle and the per-round TSLR sum is N(N+1)/2.
fn main() -> rfl::Result<()> {
    let config = presets::roundrobin_limit().config.with_horizon(40);
    let n = config.policy.fairness.len() as u64;
    let sim = Simulation::new(&config)?;
    sim.simulate(0, |log, _| {
        let sum: u64 = log.tslrs.iter().sum();
        let marker = if log.t > n && sum == n * (n + 1) / 2 { "" } else { " *" };
        println!("t={:>3} pulled={:?} tslr={:?} sum={sum}{marker}", log.t, log.selected, log.tslrs);
    })?;
    Ok(())
}
