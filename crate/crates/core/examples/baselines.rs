//! Every policy kind on the synthetic instance with common random numbers:
//! reward draws depend only on (seed, arm, round), so the comparison is paired.

use rfl::harness::{presets, SweepAxis, SweepConfig, SweepValue, sweep};
use rfl::policy::PolicyKind;

fn main() -> rfl::Result<()> {
    let base = presets::synthetic_fig5().config.with_horizon(100_000).with_seeds((0..10).collect());
    let values = PolicyKind::ALL.iter().map(|&k| SweepValue::Kind(k)).collect();
    let points = sweep(&SweepConfig::new(base, SweepAxis::Kind, values))?;
    println!("{:<13} {:>10} {:>10} {:>12} {:>8}", "policy", "regret", "avg_tslr", "violation", "t0");
    for p in points {
        let r = &p.report;
        println!(
            "{:<13} {:>10.1} {:>10.3} {:>12.2} {:>8}",
            p.value.to_string(),
            r.final_regret(),
            r.final_avg_tslr(),
            r.final_violation(),
            r.zero_violation_point.map_or("never".into(), |t| t.to_string())
        );
    }
    Ok(())
}
