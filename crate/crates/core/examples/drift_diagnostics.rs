//! Lyapunov diagnostics on one trajectory: the per-step change of V against the
//! absolute bound D, the conditional mean drift above a chosen level, and the
//! telescoping identity for V squared.
//!
//! cargo run --release --example drift_diagnostics -- 200

use rfl::harness::{presets, Simulation};

fn main() -> rfl::Result<()> {
    let level: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.0);
    let config = presets::synthetic_fig5().config.with_horizon(100_000);
    let sim = Simulation::new(&config)?;
    let report = sim.check(Some(level))?;
    let d = &report.drift;
    println!("level {} (analytic U = {:.4e})", d.level, sim.bounds()?.u_alpha_beta);
    println!("conditioned steps {}/{}", d.conditioned_steps, d.steps);
    println!("max |dV| {:.4} vs D = {}", d.max_abs_step, d.absolute_bound);
    if let (Some(m), Some(se)) = (d.mean_drift, d.mean_drift_stderr) {
        println!("mean drift {m:.5} ± {se:.5} (analytic bound {:.3e})", d.expected_drift_bound);
    }
    let t = &report.telescoping;
    println!("sum of V1 steps {} vs V1(T) - V1(0) {}", t.sum_diffs, t.endpoint_diff);
    println!("passed: {}", report.passed());
    Ok(())
}
