//! Reward environments.
//!
//! Every environment realizes one 0/1 outcome per playable arm per round,
//! whether or not the arm is pulled. Draws come from a per-arm ChaCha8 substream
//! addressed by `(seed, arm, round)`, so swapping the policy never changes any
//! arm's reward sequence and policies can be compared on common random numbers.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name of the generator recorded in run metadata.
pub const RNG_ALGORITHM: &str =
    "ChaCha8 (rand_chacha 0.3), seed_from_u64(seed), stream = arm index, word position = 2 * round";

/// Shape of the action space: fairness units, each owning one or more playable
/// sub-arms. A flat bandit is the special case of one sub-arm per unit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArmLayout {
    sub_arms: Vec<usize>,
    offsets: Vec<usize>,
    grouped: bool,
}

impl ArmLayout {
    pub fn flat(n: usize) -> Self {
        Self::build(vec![1; n], false)
    }

    pub fn grouped(sub_arms: Vec<usize>) -> Result<Self> {
        if sub_arms.is_empty() {
            return Err(Error::InvalidParameter("grouped layout needs at least one group".into()));
        }
        if let Some(g) = sub_arms.iter().position(|&m| m == 0) {
            return Err(Error::InvalidParameter(format!("group {g} has no sub-arms")));
        }
        Ok(Self::build(sub_arms, true))
    }

    fn build(sub_arms: Vec<usize>, grouped: bool) -> Self {
        let offsets = sub_arms
            .iter()
            .scan(0, |acc, &m| {
                let start = *acc;
                *acc += m;
                Some(start)
            })
            .collect();
        Self {
            sub_arms,
            offsets,
            grouped,
        }
    }

    pub fn is_grouped(&self) -> bool {
        self.grouped
    }

    /// Number of fairness units (arms when flat, groups when grouped).
    pub fn units(&self) -> usize {
        self.sub_arms.len()
    }

    /// Number of playable (unit, sub-arm) pairs.
    pub fn pairs(&self) -> usize {
        self.offsets.last().map_or(0, |o| o + self.sub_arms[self.sub_arms.len() - 1])
    }

    pub fn sub_arms(&self, unit: usize) -> usize {
        self.sub_arms[unit]
    }

    pub fn pair_index(&self, unit: usize, sub_arm: usize) -> usize {
        debug_assert!(sub_arm < self.sub_arms[unit]);
        self.offsets[unit] + sub_arm
    }

    pub fn pair_range(&self, unit: usize) -> std::ops::Range<usize> {
        self.offsets[unit]..self.offsets[unit] + self.sub_arms[unit]
    }

    pub fn unit_of(&self, pair: usize) -> usize {
        match self.offsets.binary_search(&pair) {
            Ok(u) => u,
            Err(u) => u - 1,
        }
    }
}

/// Random-access source of uniforms keyed by `(seed, substream, round)`.
///
/// Sequential access within a substream is cheap; out-of-order access seeks.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    streams: Vec<(ChaCha8Rng, u64)>,
}

impl RngStream {
    pub fn new(seed: u64, substreams: usize) -> Self {
        let streams = (0..substreams)
            .map(|s| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(s as u64);
                (rng, 0)
            })
            .collect();
        Self { seed, streams }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn substreams(&self) -> usize {
        self.streams.len()
    }

    /// Uniform in `[0, 1)` for the given substream and round.
    pub fn uniform(&mut self, substream: usize, t: u64) -> f64 {
        let (rng, next) = &mut self.streams[substream];
        if *next != t {
            rng.set_word_pos(2 * t as u128);
        }
        *next = t + 1;
        (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernoulliEnv {
    mu: Vec<f64>,
}

impl BernoulliEnv {
    pub fn new(mu: Vec<f64>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::InvalidParameter("mu must not be empty".into()));
        }
        check_means(&mu, "mu")?;
        Ok(Self { mu })
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }
}

/// User-portion or node-rate pairs: `mu[g][m]` is the success probability of
/// serving group `g` with sub-arm `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupedEnv {
    mu: Vec<Vec<f64>>,
}

impl GroupedEnv {
    pub fn new(mu: Vec<Vec<f64>>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::InvalidParameter("grouped mu must have at least one group".into()));
        }
        for (g, row) in mu.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::InvalidParameter(format!("group {g} has no sub-arms")));
            }
            check_means(row, "grouped mu")?;
        }
        Ok(Self { mu })
    }

    pub fn groups(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[Vec<f64>] {
        &self.mu
    }
}

fn check_means(mu: &[f64], what: &str) -> Result<()> {
    match mu.iter().find(|m| !(m.is_finite() && **m > 0.0 && **m <= 1.0)) {
        Some(m) => Err(Error::InvalidParameter(format!(
            "{what} entry {m} must lie in (0, 1]"
        ))),
        None => Ok(()),
    }
}

/// Pre-recorded 0/1 success table, one row per round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEnv {
    layout: ArmLayout,
    horizon: u64,
    outcomes: Vec<u8>,
    source: String,
}

impl TraceEnv {
    pub fn new(layout: ArmLayout, rows: Vec<Vec<u8>>, source: impl Into<String>) -> Result<Self> {
        let source = source.into();
        if rows.is_empty() {
            return Err(Error::EmptyTrace(source));
        }
        let width = layout.pairs();
        let mut outcomes = Vec::with_capacity(rows.len() * width);
        for (t, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::TraceParse {
                    source_name: source,
                    row: t,
                    message: format!("expected {width} entries, found {}", row.len()),
                });
            }
            if let Some(v) = row.iter().find(|v| **v > 1) {
                return Err(Error::TraceParse {
                    source_name: source,
                    row: t,
                    message: format!("entry {v} is not 0 or 1"),
                });
            }
            outcomes.extend_from_slice(row);
        }
        Ok(Self {
            layout,
            horizon: rows.len() as u64,
            outcomes,
            source,
        })
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn layout(&self) -> &ArmLayout {
        &self.layout
    }

    pub fn row(&self, t: u64) -> Result<&[u8]> {
        if t >= self.horizon {
            return Err(Error::OutOfTrace {
                t,
                horizon: self.horizon,
            });
        }
        let w = self.layout.pairs();
        let start = t as usize * w;
        Ok(&self.outcomes[start..start + w])
    }

    /// Empirical success rate of each pair over the whole trace.
    pub fn empirical_means(&self) -> Vec<f64> {
        let w = self.layout.pairs();
        let mut sums = vec![0u64; w];
        for row in self.outcomes.chunks_exact(w) {
            for (s, &v) in sums.iter_mut().zip(row) {
                *s += v as u64;
            }
        }
        sums.into_iter()
            .map(|s| s as f64 / self.horizon as f64)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Environment {
    Bernoulli(BernoulliEnv),
    Grouped(GroupedEnv),
    Trace(TraceEnv),
}

impl Environment {
    pub fn layout(&self) -> ArmLayout {
        match self {
            Environment::Bernoulli(e) => ArmLayout::flat(e.mu.len()),
            Environment::Grouped(e) => ArmLayout::grouped(e.mu.iter().map(Vec::len).collect())
                .expect("validated at construction"),
            Environment::Trace(e) => e.layout.clone(),
        }
    }

    /// Mean success probability of every playable pair, in pair order. Traces
    /// report their empirical rates.
    pub fn pair_means(&self) -> Vec<f64> {
        match self {
            Environment::Bernoulli(e) => e.mu.clone(),
            Environment::Grouped(e) => e.mu.iter().flatten().copied().collect(),
            Environment::Trace(e) => e.empirical_means(),
        }
    }

    /// Rounds available, `None` for unbounded generators.
    pub fn horizon(&self) -> Option<u64> {
        match self {
            Environment::Trace(e) => Some(e.horizon),
            _ => None,
        }
    }

    /// Realizes round `t` into `out` (one entry per pair).
    pub fn sample_into(&self, rng: &mut RngStream, t: u64, out: &mut [bool]) -> Result<()> {
        match self {
            Environment::Bernoulli(BernoulliEnv { mu }) => draw(mu.iter(), rng, t, out),
            Environment::Grouped(GroupedEnv { mu }) => draw(mu.iter().flatten(), rng, t, out),
            Environment::Trace(e) => {
                let row = e.row(t)?;
                for (o, &v) in out.iter_mut().zip(row) {
                    *o = v == 1;
                }
                Ok(())
            }
        }
    }

    pub fn sample_rewards(&self, rng: &mut RngStream, t: u64) -> Result<Vec<bool>> {
        let mut out = vec![false; self.layout().pairs()];
        self.sample_into(rng, t, &mut out)?;
        Ok(out)
    }
}

fn draw<'a>(
    mu: impl Iterator<Item = &'a f64>,
    rng: &mut RngStream,
    t: u64,
    out: &mut [bool],
) -> Result<()> {
    for ((arm, &m), o) in mu.enumerate().zip(out.iter_mut()) {
        *o = rng.uniform(arm, t) < m;
    }
    Ok(())
}

/// Which CSV layout a trace file uses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "schema", rename_all = "snake_case")]
pub enum TraceSchema {
    /// `round,arm0,arm1,...` with 0/1 bodies.
    Flat,
    /// `round,node,achievable_rate`, expanded against an ascending rate table.
    Snr { rate_table: Vec<f64> },
}

pub fn load_trace(path: impl AsRef<Path>, schema: &TraceSchema) -> Result<TraceEnv> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    match schema {
        TraceSchema::Flat => parse_flat_trace(file, &name),
        TraceSchema::Snr { rate_table } => {
            let rates = parse_snr_trace(file, &name)?;
            rate_trace_from_snr(&rates, rate_table).map(|t| t.with_source(name))
        }
    }
}

impl TraceEnv {
    fn with_source(mut self, source: String) -> Self {
        self.source = source;
        self
    }
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader)
}

fn parse_err(source: &str, row: usize, message: impl Into<String>) -> Error {
    Error::TraceParse {
        source_name: source.to_string(),
        row,
        message: message.into(),
    }
}

/// Parses a flat trace. Row numbers in errors are 1-based data rows.
pub fn parse_flat_trace<R: Read>(reader: R, source: &str) -> Result<TraceEnv> {
    let mut rdr = csv_reader(reader);
    let header = rdr.headers()?.clone();
    if header.is_empty() || header.iter().all(str::is_empty) {
        return Err(Error::EmptyTrace(source.to_string()));
    }
    if header.get(0) != Some("round") || header.len() < 2 {
        return Err(parse_err(source, 0, "header must be `round,arm0,arm1,...`"));
    }
    let arms = header.len() - 1;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec?;
        if rec.len() != arms + 1 {
            return Err(parse_err(
                source,
                row,
                format!("expected {} fields, found {}", arms + 1, rec.len()),
            ));
        }
        let round: u64 = rec[0]
            .parse()
            .map_err(|_| parse_err(source, row, format!("bad round `{}`", &rec[0])))?;
        if round != i as u64 {
            return Err(parse_err(
                source,
                row,
                format!("round {round} out of sequence, expected {i}"),
            ));
        }
        let values = rec
            .iter()
            .skip(1)
            .map(|f| match f {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                other => Err(parse_err(source, row, format!("entry `{other}` is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(Error::EmptyTrace(source.to_string()));
    }
    TraceEnv::new(ArmLayout::flat(arms), rows, source)
}

/// Parses `round,node,achievable_rate` rows into a `rounds x nodes` table.
pub fn parse_snr_trace<R: Read>(reader: R, source: &str) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv_reader(reader);
    let header = rdr.headers()?.clone();
    if header.is_empty() || header.iter().all(str::is_empty) {
        return Err(Error::EmptyTrace(source.to_string()));
    }
    if header.iter().collect::<Vec<_>>() != ["round", "node", "achievable_rate"] {
        return Err(parse_err(source, 0, "header must be `round,node,achievable_rate`"));
    }
    let mut cells: BTreeMap<(u64, usize), f64> = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec?;
        if rec.len() != 3 {
            return Err(parse_err(source, row, format!("expected 3 fields, found {}", rec.len())));
        }
        let round: u64 = rec[0]
            .parse()
            .map_err(|_| parse_err(source, row, format!("bad round `{}`", &rec[0])))?;
        let node: usize = rec[1]
            .parse()
            .map_err(|_| parse_err(source, row, format!("bad node `{}`", &rec[1])))?;
        let rate: f64 = rec[2]
            .parse()
            .ok()
            .filter(|r: &f64| r.is_finite() && *r >= 0.0)
            .ok_or_else(|| parse_err(source, row, format!("bad achievable rate `{}`", &rec[2])))?;
        if cells.insert((round, node), rate).is_some() {
            return Err(parse_err(
                source,
                row,
                format!("duplicate entry for round {round}, node {node}"),
            ));
        }
    }
    let Some(&(last_round, _)) = cells.keys().next_back() else {
        return Err(Error::EmptyTrace(source.to_string()));
    };
    let nodes = cells.keys().map(|&(_, n)| n).max().unwrap_or(0) + 1;
    let rounds = last_round as usize + 1;
    if cells.len() != rounds * nodes {
        let missing = (0..rounds as u64)
            .flat_map(|r| (0..nodes).map(move |n| (r, n)))
            .find(|k| !cells.contains_key(k))
            .expect("some cell is missing");
        return Err(parse_err(
            source,
            0,
            format!(
                "ragged table: no entry for round {}, node {}",
                missing.0, missing.1
            ),
        ));
    }
    let mut table = vec![vec![0.0; nodes]; rounds];
    for ((r, n), v) in cells {
        table[r as usize][n] = v;
    }
    Ok(table)
}

/// Expands achievable rates into node-rate success indicators: pair `(node, k)`
/// succeeds iff the achievable rate is at least `rate_table[k]`.
pub fn rate_trace_from_snr(achievable: &[Vec<f64>], rate_table: &[f64]) -> Result<TraceEnv> {
    rate_trace_with_capacity(achievable, rate_table, |x| x)
}

/// As [`rate_trace_from_snr`], first mapping each measurement through a
/// monotone capacity function (e.g. SNR to achievable rate).
pub fn rate_trace_with_capacity(
    measurements: &[Vec<f64>],
    rate_table: &[f64],
    capacity: impl Fn(f64) -> f64,
) -> Result<TraceEnv> {
    if rate_table.is_empty() {
        return Err(Error::InvalidParameter("rate table must not be empty".into()));
    }
    if rate_table.windows(2).any(|w| w[0] >= w[1]) || rate_table[0] <= 0.0 {
        return Err(Error::InvalidParameter(
            "rate table must be positive and strictly ascending".into(),
        ));
    }
    let nodes = measurements.first().map_or(0, Vec::len);
    if nodes == 0 {
        return Err(Error::EmptyTrace("snr table".into()));
    }
    let rows = measurements
        .iter()
        .enumerate()
        .map(|(t, row)| {
            if row.len() != nodes {
                return Err(parse_err("snr table", t, "ragged row"));
            }
            Ok(row
                .iter()
                .flat_map(|&m| {
                    let achievable = capacity(m);
                    rate_table.iter().map(move |&r| u8::from(achievable >= r))
                })
                .collect())
        })
        .collect::<Result<Vec<Vec<u8>>>>()?;
    TraceEnv::new(
        ArmLayout::grouped(vec![rate_table.len(); nodes])?,
        rows,
        "snr table",
    )
}

pub fn write_flat_trace(path: impl AsRef<Path>, trace: &TraceEnv) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("round");
    for a in 0..trace.layout.pairs() {
        out.push_str(&format!(",arm{a}"));
    }
    out.push('\n');
    for t in 0..trace.horizon {
        out.push_str(&t.to_string());
        for v in trace.row(t)? {
            out.push(',');
            out.push(if *v == 1 { '1' } else { '0' });
        }
        out.push('\n');
    }
    write_file(path, out.as_bytes())
}

pub fn write_snr_trace(path: impl AsRef<Path>, achievable: &[Vec<f64>]) -> Result<()> {
    let mut out = String::from("round,node,achievable_rate\n");
    for (t, row) in achievable.iter().enumerate() {
        for (n, v) in row.iter().enumerate() {
            out.push_str(&format!("{t},{n},{v}\n"));
        }
    }
    write_file(path.as_ref(), out.as_bytes())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    File::create(path)
        .and_then(|mut f| f.write_all(bytes))
        .map_err(|e| Error::io(path, e))
}

/// Records `horizon` rounds of a Bernoulli environment as a flat trace.
pub fn synthetic_flat_trace(env: &BernoulliEnv, horizon: u64, seed: u64) -> Result<TraceEnv> {
    let env = Environment::Bernoulli(env.clone());
    let n = env.layout().pairs();
    let mut rng = RngStream::new(seed, n);
    let mut buf = vec![false; n];
    let rows = (0..horizon)
        .map(|t| {
            env.sample_into(&mut rng, t, &mut buf)?;
            Ok(buf.iter().map(|&b| u8::from(b)).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    TraceEnv::new(ArmLayout::flat(n), rows, format!("synthetic(seed={seed})"))
}

/// Log-normal achievable-rate traces, one column per node: `median[n] * exp(spread * z)`.
pub fn synthetic_achievable_rates(
    medians: &[f64],
    spread: f64,
    horizon: u64,
    seed: u64,
) -> Vec<Vec<f64>> {
    let mut rng = RngStream::new(seed, 2 * medians.len());
    (0..horizon)
        .map(|t| {
            medians
                .iter()
                .enumerate()
                .map(|(n, &m)| {
                    // Box-Muller on two independent substreams.
                    let u1 = 1.0 - rng.uniform(2 * n, t);
                    let u2 = rng.uniform(2 * n + 1, t);
                    let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
                    m * (spread * z).exp()
                })
                .collect()
        })
        .collect()
}
