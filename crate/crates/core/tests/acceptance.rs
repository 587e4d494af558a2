//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line; the
//! process exits non-zero if any criterion fails.

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use rfl::bounds::{prop1_constants, prop2_second_branch, prop3_bound, tau0, BoundInputs};
use rfl::env::RngStream;
use rfl::harness::{presets, sweep, RunConfig, Simulation, SweepPoint};
use rfl::oracle::{brute_force_lp, max_tightness, solve_marginal_lp};
use rfl::policy::PolicyKind;
use rfl::state::LEMMA1_TOLERANCE;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn same_sig_figs(got: f64, want: f64, figs: i32) -> bool {
    (got - want).abs() <= 0.5 * 10f64.powi(want.abs().log10().floor() as i32 - figs + 1)
}

struct Sweeps {
    alpha: Vec<SweepPoint>,
    beta: Vec<SweepPoint>,
}

fn sweeps() -> Sweeps {
    Sweeps {
        alpha: sweep(&presets::synthetic_fig5().sweep.unwrap()).expect("alpha sweep"),
        beta: sweep(&presets::synthetic_fig6().sweep.unwrap()).expect("beta sweep"),
    }
}

fn preset_configs() -> Vec<(String, RunConfig)> {
    let mut out: Vec<(String, RunConfig)> = Vec::new();
    for p in presets::all() {
        let mut configs = vec![p.config.clone()];
        if let Some(s) = &p.sweep {
            configs.extend(s.points().unwrap());
        }
        for c in configs {
            if !out.iter().any(|(_, seen)| *seen == c) {
                let label = format!("{} a={} b={}", p.name, c.policy.alpha, c.policy.beta);
                out.push((label, c));
            }
        }
    }
    out
}

fn lemma1_everywhere() -> Outcome {
    let mut runs = Vec::new();
    for (label, base) in preset_configs() {
        for kind in PolicyKind::ALL {
            let mut c = base.clone();
            c.policy.kind = kind;
            for &seed in &base.seeds {
                runs.push((format!("{label} {}", kind.name()), c.clone(), seed));
            }
        }
    }
    let checked: Vec<Result<u64, String>> = runs
        .par_iter()
        .map(|(label, config, seed)| {
            let sim = Simulation::new(config).map_err(|e| format!("{label}: {e}"))?;
            let lambda = &config.policy.fairness.lambda;
            let mut worst = f64::NEG_INFINITY;
            let mut steps = 0u64;
            sim.simulate(*seed, |_, sched| {
                steps += 1;
                for (s, l) in sched.units().iter().zip(lambda) {
                    worst = worst.max(l * s.tslr as f64 - 1.0 - s.queue);
                }
            })
            .map_err(|e| format!("{label} seed {seed}: {e}"))?;
            if worst > LEMMA1_TOLERANCE {
                return Err(format!("{label} seed {seed}: lambda*Z - 1 - Q reached {worst:e}"));
            }
            Ok(steps)
        })
        .collect();
    let failures: Vec<&String> = checked.iter().filter_map(|r| r.as_ref().err()).collect();
    let steps: u64 = checked.iter().filter_map(|r| r.as_ref().ok()).sum();
    let seeds = presets::synthetic_fig5().config.seeds.len();
    match failures.first() {
        None => outcome(true, format!("{} runs ({seeds} seeds each), {steps} steps checked", runs.len())),
        Some(f) => outcome(false, format!("{} failures, first: {f}", failures.len())),
    }
}

fn bound_fidelity() -> Outcome {
    let mu = presets::SYNTHETIC_MU;
    let lambda = presets::synthetic_lambda();
    let delta_star = max_tightness(&mu, &lambda, 1).unwrap();
    let inputs = BoundInputs {
        n: 6,
        s_max: 1,
        mu_min: 0.6,
        mu_max: 0.85,
        lambda_min: lambda.iter().copied().fold(f64::INFINITY, f64::min),
        delta: delta_star,
        alpha: 1.0,
        beta: 1.0,
        epsilon: 0.001,
        horizon: 200_000,
    };
    let c = prop1_constants(&inputs).unwrap();
    let prop3_inputs = BoundInputs {
        n: 2,
        s_max: 1,
        mu_min: 0.5,
        mu_max: 0.8,
        lambda_min: 0.05,
        delta: 0.1,
        alpha: 1.0,
        beta: 10.0,
        epsilon: 0.001,
        horizon: 1000,
    };
    let prop3 = prop3_bound(&prop3_inputs);
    let t = tau0(1.0, 10.0, 0.8, 0.5, 0.2);
    let prop2 = prop2_second_branch(&inputs);
    let checks = [
        ("D(1)=4875", same_sig_figs(c.d, 4875.0, 6)),
        ("delta*=0.023828", same_sig_figs(delta_star, 0.023828, 5)),
        ("tau0=4", t == 4),
        ("prop3=800", same_sig_figs(prop3, 800.0, 6)),
        ("theta=6.27e-12", same_sig_figs(c.theta, 6.27e-12, 3)),
        ("prop2 branch=20144", same_sig_figs(prop2, 20144.0, 5)),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    outcome(
        failed.is_empty(),
        format!(
            "D={} delta*={delta_star:.7} tau0={t} prop3={prop3} theta={:.4e} prop2={prop2:.2}{}",
            c.d,
            c.theta,
            if failed.is_empty() { String::new() } else { format!(" mismatched: {failed:?}") }
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut rng = RngStream::new(0x0ac1e, 16);
    let mut worst: f64 = 0.0;
    let mut tested = 0;
    let mut draw = 0u64;
    let mut u = |k: usize| {
        draw += 1;
        rng.uniform(k, draw)
    };
    while tested < 50 {
        let n = 1 + (u(0) * 4.0) as usize;
        let s = 1 + (u(1) * 2.0) as usize;
        let mu: Vec<f64> = (0..n).map(|i| 0.1 + 0.9 * u(2 + i)).collect();
        let lambda: Vec<f64> = (0..n).map(|i| u(6 + i) * mu[i] * s as f64 / n as f64 * 0.9).collect();
        let star = max_tightness(&mu, &lambda, s).unwrap();
        if star <= 0.0 {
            continue;
        }
        let delta = u(10) * star;
        let greedy = solve_marginal_lp(&mu, &lambda, delta, s).unwrap().optimal_rate;
        let Some(exact) = brute_force_lp(&mu, &lambda, delta, s).unwrap() else {
            return outcome(false, format!("enumeration found no feasible point for {mu:?} {lambda:?}"));
        };
        worst = worst.max((greedy - exact).abs());
        tested += 1;
    }
    outcome(worst <= 2e-3, format!("{tested} instances, max |greedy - enumeration| = {worst:.3e} (tol 2e-3)"))
}

fn fairness_satisfied(s: &Sweeps) -> Outcome {
    let base = s.alpha.iter().find(|p| p.config.policy.alpha == 1.0).unwrap();
    let r = &base.report;
    let slack: Vec<f64> = r.reward_fraction.iter().zip(&r.lambda).map(|(f, l)| f - (l - 0.005)).collect();
    let worst = slack.iter().copied().fold(f64::INFINITY, f64::min);
    let fr: Vec<String> = r.reward_fraction.iter().map(|f| format!("{f:.4}")).collect();
    outcome(worst >= 0.0, format!("fractions [{}], min margin over lambda-0.005 = {worst:.4}", fr.join(", ")))
}

fn t0_of(p: &SweepPoint) -> Option<u64> {
    p.report.zero_violation_point.filter(|&t| t < p.config.horizon)
}

fn zero_violation(s: &Sweeps) -> Outcome {
    let a: Vec<Option<u64>> = s.alpha.iter().map(t0_of).collect();
    let b: Vec<Option<u64>> = s.beta.iter().map(t0_of).collect();
    let settled = a.iter().chain(&b).all(Option::is_some);
    let a_inc = a.windows(2).all(|w| w[0] < w[1]);
    let b_nondec = b.windows(2).all(|w| w[0] <= w[1]);
    outcome(
        settled && a_inc && b_nondec,
        format!("t0 over alpha {{0.1,1,5}}: {a:?}; over beta {{1,10,50}}: {b:?}"),
    )
}

fn tradeoffs(s: &Sweeps) -> Outcome {
    let tslr = |v: &[SweepPoint]| v.iter().map(|p| p.report.final_avg_tslr()).collect::<Vec<_>>();
    let regret = |v: &[SweepPoint]| v.iter().map(|p| p.report.final_regret()).collect::<Vec<_>>();
    let inc = |x: &[f64]| x.windows(2).all(|w| w[0] < w[1]);
    let dec = |x: &[f64]| x.windows(2).all(|w| w[0] > w[1]);
    let (ta, ra, tb, rb) = (tslr(&s.alpha), regret(&s.alpha), tslr(&s.beta), regret(&s.beta));
    let fmt = |x: &[f64]| x.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(" ");
    outcome(
        dec(&ta) && inc(&ra) && inc(&tb) && dec(&rb),
        format!(
            "alpha: tslr [{}] regret [{}]; beta: tslr [{}] regret [{}]",
            fmt(&ta),
            fmt(&ra),
            fmt(&tb),
            fmt(&rb)
        ),
    )
}

fn bound_validity(s: &Sweeps) -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut min_ratio = f64::INFINITY;
    for p in s.alpha.iter().chain(&s.beta) {
        let b = p.simulation.bounds().unwrap();
        if let Some(bound) = b.regularity_bound {
            checked += 1;
            min_ratio = min_ratio.min(bound / p.report.final_avg_tslr());
            if p.report.avg_tslr.iter().any(|v| *v > bound) {
                failures.push(format!("tslr a={} b={}", p.config.policy.alpha, p.config.policy.beta));
            }
        }
        if let Some(bound) = b.regret_bound {
            checked += 1;
            min_ratio = min_ratio.min(bound / p.report.final_regret());
            if p.report.regret.iter().any(|v| *v > bound) {
                failures.push(format!("regret a={} b={}", p.config.policy.alpha, p.config.policy.beta));
            }
        }
    }
    outcome(
        failures.is_empty() && checked > 0,
        format!("{checked} bound checks, smallest bound/observed ratio {min_ratio:.1}; failures {failures:?}"),
    )
}

fn remark3_schedule() -> Outcome {
    let config = presets::remark3().config.with_horizon(100 + 10_000);
    let sim = Simulation::new(&config).unwrap();
    let expected = sim.bounds().unwrap().tau0.unwrap();
    let mut pulls = Vec::new();
    sim.simulate(config.seeds[0], |log, _| {
        if log.selected == [1] {
            pulls.push(log.t);
        }
    })
    .unwrap();
    let gaps: Vec<u64> = pulls.windows(2).filter(|w| w[0] > 100).map(|w| w[1] - w[0]).collect();
    let hits = gaps.iter().filter(|&&g| g == expected).count();
    let share = hits as f64 / gaps.len().max(1) as f64;
    outcome(share >= 0.95, format!("tau0={expected}, {hits}/{} gaps match ({:.1}%)", gaps.len(), 100.0 * share))
}

fn round_robin_limit() -> Outcome {
    let config = presets::roundrobin_limit().config;
    let n = config.policy.fairness.len() as u64;
    let target = n * (n + 1) / 2;
    let sim = Simulation::new(&config).unwrap();
    let bad: Vec<(u64, u64)> = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let mut bad = 0u64;
            sim.simulate(seed, |log, _| {
                if log.t > n && log.tslrs.iter().sum::<u64>() != target {
                    bad += 1;
                }
            })
            .unwrap();
            (seed, bad)
        })
        .collect();
    let total: u64 = bad.iter().map(|b| b.1).sum();
    outcome(
        total == 0,
        format!("N={n}, target sum {target}, {} seeds x {} rounds, {total} mismatching rounds", bad.len(), config.horizon - n),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut mismatched = Vec::new();
    for name in presets::NAMES {
        let mut csvs = Vec::new();
        for run in ["first", "second"] {
            let out = dir.path().join(name).join(run);
            let status = Command::new(env!("CARGO_BIN_EXE_rfl"))
                .args(["run", "--preset", name, "--out"])
                .arg(&out)
                .stderr(std::process::Stdio::null())
                .status()
                .unwrap();
            if !status.success() {
                return outcome(false, format!("{name}: run exited with {status}"));
            }
            csvs.push(fs::read(out.join("series.csv")).unwrap());
        }
        if csvs[0] != csvs[1] {
            mismatched.push(name);
        }
    }
    outcome(
        mismatched.is_empty(),
        format!("{} presets run twice through the CLI; differing series.csv: {mismatched:?}", presets::NAMES.len()),
    )
}

fn drift() -> Outcome {
    let config = presets::synthetic_fig5().config.with_horizon(100_000);
    let sim = Simulation::new(&config).unwrap();
    let analytic_u = sim.bounds().unwrap().u_alpha_beta;
    let report = sim.check(Some(0.0)).unwrap();
    let d = &report.drift;
    let t = &report.telescoping;
    outcome(
        d.conditioned_steps == 100_000 && d.absolute_bound_holds() && t.holds,
        format!(
            "U override 0 (analytic {analytic_u:.3e}): {} conditioned steps, max |dV| {:.3} <= D {}; telescoping {} vs {} (|diff| {:.1e}, rel tol 1e-9)",
            d.conditioned_steps,
            d.max_abs_step,
            d.absolute_bound,
            t.sum_diffs,
            t.endpoint_diff,
            (t.sum_diffs - t.endpoint_diff).abs()
        ),
    )
}

fn timed(budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> (Outcome, Duration, bool) {
    let start = Instant::now();
    let o = f();
    let took = start.elapsed();
    let in_budget = budget.is_none_or(|b| took <= b);
    (o, took, in_budget)
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome, Duration, Option<Duration>)> = Vec::new();
    let mut record = |id, name, budget: Option<Duration>, f: &dyn Fn() -> Outcome| {
        let (mut o, took, in_budget) = timed(budget, f);
        if !in_budget {
            o.pass = false;
            o.detail.push_str(" [over time budget]");
        }
        let line = format!(
            "[{}] {id:>2} {name}: {} ({:.1}s{})",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64(),
            budget.map_or(String::new(), |b| format!(" / {}s", b.as_secs()))
        );
        println!("{line}");
        results.push((id, name, o, took, budget));
    };

    record(1, "queue and TSLR coupling", Some(Duration::from_secs(120)), &lemma1_everywhere);
    record(2, "bound formulas", None, &bound_fidelity);
    record(3, "oracle equivalence", Some(Duration::from_secs(30)), &oracle_equivalence);

    let start = Instant::now();
    let s = sweeps();
    let sweep_time = start.elapsed();
    println!("      (alpha and beta sweeps, 20 seeds x 2e5 rounds each point: {:.1}s)", sweep_time.as_secs_f64());
    record(4, "fairness satisfaction", Some(Duration::from_secs(60).saturating_sub(sweep_time)), &|| fairness_satisfied(&s));
    record(5, "zero-violation settling", None, &|| zero_violation(&s));
    record(6, "regularity-regret tradeoff", None, &|| tradeoffs(&s));
    record(7, "bound validity", None, &|| bound_validity(&s));
    record(8, "fixed-weight period", None, &remark3_schedule);
    record(9, "round-robin limit", None, &round_robin_limit);
    record(10, "determinism", None, &determinism);
    record(11, "drift diagnostics", None, &drift);

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!("acceptance: {}/{} criteria passed", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        println!("failed: {failed:?}");
        std::process::exit(1);
    }
}
