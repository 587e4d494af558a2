//! Evaluates the analytic guarantees for the synthetic instance across alpha.
//! The constants are loose by many orders of magnitude; this prints them next
//! to the simulated values they bound.

use rfl::harness::{presets, Simulation};

fn main() -> rfl::Result<()> {
    let base = presets::synthetic_fig5().config.with_seeds((0..5).collect());
    println!(
        "{:>5} {:>10} {:>12} {:>12} {:>12} {:>10} {:>12} {:>10} {:>12}",
        "alpha", "D", "U", "g0", "t0_bound", "tslr_bnd", "tslr_obs", "regret_bnd", "regret_obs"
    );
    for alpha in [0.1, 1.0, 5.0] {
        let mut config = base.clone();
        config.policy.alpha = alpha;
        let sim = Simulation::new(&config)?;
        let bounds = sim.bounds()?;
        let observed = sim.run_many(&config.seeds)?;
        println!(
            "{alpha:>5} {:>10.1} {:>12.4e} {:>12.4e} {:>12.4e} {:>10.1} {:>12.3} {:>10.0} {:>12.1}",
            bounds.d_alpha,
            bounds.u_alpha_beta,
            bounds.g0.unwrap_or(f64::NAN),
            bounds.t0_bound.unwrap_or(f64::NAN),
            bounds.regularity_bound.unwrap_or(f64::NAN),
            observed.final_avg_tslr(),
            bounds.regret_bound.unwrap_or(f64::NAN),
            observed.final_regret(),
        );
    }
    println!("delta* = {:.6}", Simulation::new(&base)?.oracle().delta_star);
    Ok(())
}
