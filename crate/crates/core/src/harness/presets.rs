//! Built-in experiment presets. All default to `T = 200_000` and seeds `0..20`.

use crate::error::{Error, Result};
use crate::policy::{FeasibleFamily, PolicyConfig, PolicyKind};
use crate::state::FairnessSpec;

use super::config::{EnvironmentSpec, RunConfig, SweepAxis, SweepConfig, DEFAULT_RECORD_INTERVAL};

pub const PRESET_HORIZON: u64 = 200_000;
pub const PRESET_SEEDS: u64 = 20;
pub const NAMES: [&str; 4] = ["synthetic-fig5", "synthetic-fig6", "remark3", "roundrobin-limit"];

pub const SYNTHETIC_MU: [f64; 6] = [0.7, 0.8, 0.65, 0.75, 0.85, 0.6];
pub const SYNTHETIC_EPSILON: f64 = 0.001;

/// `0.8 * (0.7, 1.6, 1.95, 3, 4.25, 3.6) / 21`.
pub fn synthetic_lambda() -> Vec<f64> {
    [0.7, 1.6, 1.95, 3.0, 4.25, 3.6]
        .iter()
        .map(|w| 0.8 * w / 21.0)
        .collect()
}

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub config: RunConfig,
    pub sweep: Option<SweepConfig>,
}

fn base(mu: Vec<f64>, lambda: Vec<f64>, kind: PolicyKind, alpha: f64, beta: f64) -> RunConfig {
    let fairness = FairnessSpec {
        lambda,
        epsilon: SYNTHETIC_EPSILON,
    };
    RunConfig {
        environment: EnvironmentSpec::Bernoulli { mu },
        family: FeasibleFamily::TopK { s_max: 1 },
        policy: PolicyConfig::new(kind, alpha, beta, fairness),
        horizon: PRESET_HORIZON,
        seeds: (0..PRESET_SEEDS).collect(),
        record_interval: DEFAULT_RECORD_INTERVAL,
        benchmark_delta: SYNTHETIC_EPSILON,
        out_dir: None,
    }
}

/// Six-arm synthetic instance, RFL with `alpha = beta = 1`, swept over alpha.
pub fn synthetic_fig5() -> Preset {
    let config = base(SYNTHETIC_MU.to_vec(), synthetic_lambda(), PolicyKind::Rfl, 1.0, 1.0);
    Preset {
        name: "synthetic-fig5",
        sweep: Some(SweepConfig::numeric(config.clone(), SweepAxis::Alpha, &[0.1, 1.0, 5.0])),
        config,
    }
}

/// Same instance swept over beta at `alpha = 1`.
pub fn synthetic_fig6() -> Preset {
    let config = base(SYNTHETIC_MU.to_vec(), synthetic_lambda(), PolicyKind::Rfl, 1.0, 1.0);
    Preset {
        name: "synthetic-fig6",
        sweep: Some(SweepConfig::numeric(config.clone(), SweepAxis::Beta, &[1.0, 10.0, 50.0])),
        config,
    }
}

/// Two arms with deterministic rewards scheduled by known means `(0.8, 0.5)`.
pub fn remark3() -> Preset {
    let mut config = base(vec![1.0, 1.0], vec![0.05, 0.2], PolicyKind::FixedWeight, 1.0, 10.0);
    config.policy.known_mu = Some(vec![0.8, 0.5]);
    Preset {
        name: "remark3",
        config,
        sweep: None,
    }
}

/// Deterministic rewards with a dominant TSLR term, which forces round robin.
pub fn roundrobin_limit() -> Preset {
    Preset {
        name: "roundrobin-limit",
        config: base(vec![1.0; 6], synthetic_lambda(), PolicyKind::Rfl, 100.0, 0.0),
        sweep: None,
    }
}

pub fn by_name(name: &str) -> Result<Preset> {
    match name {
        "synthetic-fig5" => Ok(synthetic_fig5()),
        "synthetic-fig6" => Ok(synthetic_fig6()),
        "remark3" => Ok(remark3()),
        "roundrobin-limit" => Ok(roundrobin_limit()),
        other => Err(Error::InvalidParameter(format!(
            "unknown preset `{other}`; expected one of {}",
            NAMES.join(", ")
        ))),
    }
}

pub fn all() -> Vec<Preset> {
    NAMES.iter().map(|n| by_name(n).expect("listed preset")).collect()
}
