//! Records a Bernoulli environment into a flat 0/1 trace file, then replays the
//! file through a JSON config. Replaying the trace for the recording seed gives
//! the same trajectory as the live environment.

use std::fs;

use rfl::env::{synthetic_flat_trace, write_flat_trace, BernoulliEnv};
use rfl::harness::{presets, run, EnvironmentSpec, RunConfig};

fn main() -> rfl::Result<()> {
    let dir = tempfile::tempdir().map_err(|e| rfl::Error::InvalidParameter(e.to_string()))?;
    let live = presets::synthetic_fig5().config.with_horizon(20_000).with_seeds(vec![3]);
    let EnvironmentSpec::Bernoulli { mu } = &live.environment else { unreachable!() };

    let trace = synthetic_flat_trace(&BernoulliEnv::new(mu.clone())?, live.horizon, 3)?;
    write_flat_trace(dir.path().join("arms.csv"), &trace)?;

    let mut replay = live.clone();
    replay.environment = EnvironmentSpec::TraceFlat { path: "arms.csv".into() };
    let config_path = dir.path().join("replay.json");
    fs::write(&config_path, replay.to_json()).map_err(|e| rfl::Error::InvalidParameter(e.to_string()))?;
    let replay = RunConfig::load(&config_path)?;

    let a = run(&live, 3)?;
    let b = run(&replay, 3)?;
    println!("live   avg tslr {:.4}, fractions {:?}", a.avg_tslr.last().unwrap(), a.reward_fraction);
    println!("replay avg tslr {:.4}, fractions {:?}", b.avg_tslr.last().unwrap(), b.reward_fraction);
    println!("identical trajectories: {}", a.tslrs == b.tslrs && a.queues == b.queues);
    Ok(())
}
