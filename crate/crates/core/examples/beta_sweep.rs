//! Sweeps the exploitation weight beta at alpha = 1 and reports how the
//! fairness settling time, regularity and regret move.
//!
//! cargo run --release --example beta_sweep

use rfl::harness::{presets, sweep};

fn main() -> rfl::Result<()> {
    let config = presets::synthetic_fig6().sweep.expect("beta sweep preset");
    for point in sweep(&config)? {
        let r = &point.report;
        println!(
            "beta={:<4} regret={:>9.1}±{:<6.1} avg_tslr={:>7.3}±{:.3} t0={:?}",
            point.value.to_string(),
            r.final_regret(),
            r.regret_se.last().unwrap(),
            r.final_avg_tslr(),
            r.avg_tslr_se.last().unwrap(),
            r.zero_violation_point,
        );
        let fractions: Vec<String> = r
            .reward_fraction
            .iter()
            .zip(&r.lambda)
            .map(|(f, l)| format!("{f:.4}/{l:.4}"))
            .collect();
        println!("    reward fraction / target: {}", fractions.join("  "));
    }
    Ok(())
}
