//! Node/rate scheduling from an achievable-rate trace. A synthetic log-normal
//! trace is written in the `round,node,achievable_rate` format, loaded back
//! through a config, and scheduled one (node, rate) pair per round.
//!
//! cargo run --release --example snr_node_rate

use rfl::env::{synthetic_achievable_rates, write_snr_trace};
use rfl::harness::{EnvironmentSpec, RunConfig, Simulation};
use rfl::policy::{FeasibleFamily, PolicyConfig, PolicyKind};
use rfl::state::FairnessSpec;

const RATE_TABLE: [f64; 9] = [0.73, 0.91, 1.46, 1.825, 2.19, 2.37, 2.92, 3.65, 4.38];

fn main() -> rfl::Result<()> {
    let horizon = 50_000;
    let medians = [1.2, 1.6, 2.0, 2.4, 2.8, 3.2];
    let dir = tempfile::tempdir().map_err(|e| rfl::Error::InvalidParameter(e.to_string()))?;
    let path = dir.path().join("snr.csv");
    write_snr_trace(&path, &synthetic_achievable_rates(&medians, 0.5, horizon, 11))?;

    let lambda: Vec<f64> = (1..=6).map(|n| 0.5 * n as f64 / 21.0).collect();
    let config = RunConfig {
        environment: EnvironmentSpec::TraceSnr {
            path,
            rate_table: RATE_TABLE.to_vec(),
        },
        family: FeasibleFamily::GroupedOnePerGroup { group_budget: 1 },
        policy: PolicyConfig::new(PolicyKind::Rfl, 1.0, 1.0, FairnessSpec::new(lambda, 0.001)?),
        horizon,
        seeds: vec![0],
        record_interval: 1000,
        benchmark_delta: 0.001,
        out_dir: None,
    };
    let sim = Simulation::new(&config)?;
    let mut rate_counts = vec![[0u64; RATE_TABLE.len()]; medians.len()];
    sim.simulate(0, |log, _| {
        for &p in &log.selected {
            let node = sim.layout().unit_of(p);
            rate_counts[node][p - sim.layout().pair_range(node).start] += 1;
        }
    })?;
    let report = sim.run(0)?;
    println!("delta* = {:.4}", sim.oracle().delta_star);
    for (node, counts) in rate_counts.iter().enumerate() {
        println!(
            "node {node}: fraction {:.4} (target {:.4}) rate picks {counts:?}",
            report.reward_fraction[node], config.policy.fairness.lambda[node]
        );
    }
    println!("avg tslr {:.3}", report.avg_tslr.last().unwrap());
    Ok(())
}
