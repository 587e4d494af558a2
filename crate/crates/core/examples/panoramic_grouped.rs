//! User/portion scheduling for panoramic video: each user is a group whose
//! sub-arms are the transmitted viewport portions. A larger portion covers the
//! viewport more often but is less likely to arrive intact; the sub-arm mean is
//! the product of the two.

use rfl::harness::{EnvironmentSpec, RunConfig, Simulation};
use rfl::policy::{FeasibleFamily, PolicyConfig, PolicyKind};
use rfl::state::FairnessSpec;

const PORTIONS: [f64; 5] = [0.625, 0.65, 0.7, 0.75, 1.0];

fn main() -> rfl::Result<()> {
    let link_quality = [0.95, 0.9, 0.85, 0.8, 0.75, 0.7];
    let mu: Vec<Vec<f64>> = link_quality
        .iter()
        .map(|q: &f64| PORTIONS.iter().map(|p| p * q.powf(4.0 * p)).collect())
        .collect();
    let lambda: Vec<f64> = (1..=6).map(|u| 0.8 * 0.3 * u as f64 / 21.0).collect();

    let config = RunConfig {
        environment: EnvironmentSpec::Grouped { mu: mu.clone() },
        family: FeasibleFamily::GroupedOnePerGroup { group_budget: 1 },
        policy: PolicyConfig::new(PolicyKind::Rfl, 1.0, 1.0, FairnessSpec::new(lambda, 0.001)?),
        horizon: 100_000,
        seeds: (0..8).collect(),
        record_interval: 1000,
        benchmark_delta: 0.001,
        out_dir: None,
    };
    let sim = Simulation::new(&config)?;
    let mut picks = vec![[0u64; PORTIONS.len()]; mu.len()];
    sim.simulate(0, |log, _| {
        for &p in &log.selected {
            let user = sim.layout().unit_of(p);
            picks[user][p - sim.layout().pair_range(user).start] += 1;
        }
    })?;
    let report = sim.run_many(&config.seeds)?;
    for (user, row) in mu.iter().enumerate() {
        let best = row.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        println!(
            "user {user}: best portion {} fraction {:.4} >= {:.4}  portion picks {:?}",
            PORTIONS[best], report.reward_fraction[user], report.lambda[user], picks[user]
        );
    }
    println!("regret {:.1}, avg tslr {:.3}", report.final_regret(), report.final_avg_tslr());
    Ok(())
}
