//! Runs a preset and writes the standard output directory
//! (config.json, series.csv, summary.json, bounds.json).
//!
//! cargo run --release --example write_run_directory -- remark3 out/remark3

use std::path::PathBuf;

use rfl::harness::{presets, write_run_dir, Simulation};

fn main() -> rfl::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "synthetic-fig5".into());
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out").join(&name));
    let config = presets::by_name(&name)?.config;
    let sim = Simulation::new(&config)?;
    let report = sim.run_many(&config.seeds)?;
    let summary = write_run_dir(&out, &sim, &report, &sim.bounds()?)?;
    println!("{}: regret {:.1}, avg tslr {:.3}, t0 {:?}", out.display(), summary.final_regret, summary.final_avg_tslr, summary.zero_violation_point);
    Ok(())
}
