//! Sweeps the TSLR weight alpha on the six-arm synthetic instance and prints
//! final regret, running-average TSLR and the zero-violation point.
//!
//! cargo run --release --example alpha_sweep

use rfl::harness::{presets, sweep, sweep_summary};

fn main() -> rfl::Result<()> {
    let preset = presets::synthetic_fig5();
    let config = preset.sweep.expect("alpha sweep preset");
    let points = sweep(&config)?;
    println!("{:>6} {:>12} {:>10} {:>8}", "alpha", "regret", "avg_tslr", "t0");
    for row in sweep_summary(config.axis, &points).rows {
        let t0 = row.zero_violation_point.map_or("never".into(), |t| t.to_string());
        println!("{:>6} {:>12.1} {:>10.3} {:>8}", row.value.to_string(), row.final_regret, row.final_avg_tslr, t0);
    }
    Ok(())
}
