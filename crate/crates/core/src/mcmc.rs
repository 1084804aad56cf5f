//! Metropolis sampling of the edge-triangle model on labeled graphs.

use std::io::Write;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{turan_graph, DensityPoint, Graph};

/// Stream description recorded with every run.
pub const RNG_ALGORITHM: &str =
    "ChaCha8 (rand_chacha 0.9, seed_from_u64); uniform f64 = (next_u64 >> 11) * 2^-53; \
     index below m = (next_u64 as u128 * m) >> 64";

/// Deterministic random stream shared by all samplers.
#[derive(Clone, Debug)]
pub struct Stream(ChaCha8Rng);

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..m`, `m >= 1`.
    pub fn below(&mut self, m: u64) -> u64 {
        ((self.0.next_u64() as u128 * m as u128) >> 64) as u64
    }
}

/// `n²(β₁ t(K₂) + β₂ t(K₃)) = 2β₁E + 6β₂T/n`.
pub fn log_weight(g: &Graph, beta: (f64, f64)) -> f64 {
    let n = g.node_count() as f64;
    2.0 * beta.0 * g.edge_count() as f64 + 6.0 * beta.1 * g.triangle_count() as f64 / n
}

/// Change in log-weight from the given edge and triangle deltas.
pub fn delta_log_weight(n: usize, beta: (f64, f64), de: i8, dt: i64) -> f64 {
    2.0 * beta.0 * de as f64 + 6.0 * beta.1 * dt as f64 / n as f64
}

/// Starting state of a chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Init {
    Empty,
    Complete,
    Turan(usize),
    /// Each edge present independently with probability `p`.
    Random(f64),
}

impl std::fmt::Display for Init {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Init::Empty => write!(f, "empty"),
            Init::Complete => write!(f, "complete"),
            Init::Turan(r) => write!(f, "turan:{r}"),
            Init::Random(p) => write!(f, "random:{p}"),
        }
    }
}

impl std::str::FromStr for Init {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown init `{s}` (empty, complete, turan:R, random:P)"));
        match s.split_once(':') {
            None if s == "empty" => Ok(Init::Empty),
            None if s == "complete" => Ok(Init::Complete),
            Some(("turan", r)) => Ok(Init::Turan(r.parse().map_err(|_| bad())?)),
            Some(("random", p)) => Ok(Init::Random(p.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub n: usize,
    pub beta: (f64, f64),
    pub steps: u64,
    pub seed: u64,
    pub init: Init,
    pub thin: u64,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Config(m));
        if self.n < 2 {
            return err(format!("sampler needs n >= 2, got {}", self.n));
        }
        if self.steps == 0 {
            return err("steps must be at least 1".into());
        }
        if self.thin == 0 {
            return err("thin must be at least 1".into());
        }
        if !self.beta.0.is_finite() || !self.beta.1.is_finite() {
            return err("beta must be finite".into());
        }
        match self.init {
            Init::Turan(r) if r == 0 || r > self.n => err(format!("turan init needs 1 <= r <= n, got {r}")),
            Init::Random(p) if !(0.0..=1.0).contains(&p) => err(format!("random init needs p in [0, 1], got {p}")),
            _ => Ok(()),
        }
    }

    /// Metadata pinning the run, including the random stream algorithm.
    pub fn metadata(&self) -> serde_json::Value {
        serde_json::json!({ "config": self, "rng": RNG_ALGORITHM })
    }
}

/// A chain state with running edge and triangle counts.
#[derive(Clone, Debug)]
pub struct Sampler {
    graph: Graph,
    beta: (f64, f64),
    stream: Stream,
    edges: u64,
    triangles: u64,
    steps: u64,
    accepted: u64,
}

impl Sampler {
    pub fn new(config: &SamplerConfig) -> Result<Self> {
        config.validate()?;
        let mut stream = Stream::new(config.seed);
        let n = config.n;
        let graph = match config.init {
            Init::Empty => Graph::empty(n)?,
            Init::Complete => Graph::complete(n)?,
            Init::Turan(r) => turan_graph(n, r)?,
            Init::Random(p) => {
                let mut edges = Vec::new();
                for i in 0..n {
                    for j in i + 1..n {
                        if stream.uniform() < p {
                            edges.push((i, j));
                        }
                    }
                }
                Graph::from_edges(n, edges)?
            }
        };
        Ok(Self::from_graph(graph, config.beta, stream))
    }

    pub fn from_graph(graph: Graph, beta: (f64, f64), stream: Stream) -> Self {
        let (edges, triangles) = (graph.edge_count(), graph.triangle_count());
        Sampler { graph, beta, stream, edges, triangles, steps: 0, accepted: 0 }
    }

    /// One Metropolis update; returns whether the proposal was accepted.
    pub fn step(&mut self) -> bool {
        let accepted = metropolis_step(&mut self.graph, self.beta, &mut self.stream);
        self.steps += 1;
        if let Some((de, dt)) = accepted {
            self.accepted += 1;
            self.edges = self.edges.wrapping_add_signed(de as i64);
            self.triangles = self.triangles.wrapping_add_signed(dt);
        }
        accepted.is_some()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn counts(&self) -> (u64, u64) {
        (self.edges, self.triangles)
    }

    pub fn densities(&self) -> DensityPoint {
        DensityPoint::from_counts(self.graph.node_count(), self.edges, self.triangles)
    }

    /// Densities as floats without forming rationals.
    pub fn densities_f64(&self) -> (f64, f64) {
        let n = self.graph.node_count() as f64;
        (2.0 * self.edges as f64 / (n * n), 6.0 * self.triangles as f64 / (n * n * n))
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.accepted as f64 / self.steps as f64
        }
    }
}

/// Proposes flipping a uniformly random pair and accepts with probability
/// `min(1, e^Δ)`. Returns the applied `(ΔE, ΔT)` when accepted.
pub fn metropolis_step(g: &mut Graph, beta: (f64, f64), stream: &mut Stream) -> Option<(i8, i64)> {
    let n = g.node_count();
    let i = stream.below(n as u64) as usize;
    let mut j = stream.below(n as u64 - 1) as usize;
    if j >= i {
        j += 1;
    }
    let (de, dt) = g.flip_delta(i, j).expect("distinct in-range nodes");
    let delta = delta_log_weight(n, beta, de, dt);
    if delta >= 0.0 || stream.uniform().ln() < delta {
        g.flip_edge(i, j).expect("distinct in-range nodes");
        Some((de, dt))
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub step: u64,
    pub e: f64,
    pub t: f64,
    /// Fraction of proposals accepted up to this step.
    pub accepted_frac: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub config: SamplerConfig,
    pub records: Vec<TrajectoryRecord>,
    pub acceptance_rate: f64,
    pub final_graph: Graph,
}

impl Trajectory {
    /// CSV with columns `step,e,t,accepted_frac`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for r in &self.records {
            wr.serialize(r).map_err(|e| Error::Io(e.into()))?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn final_point(&self) -> DensityPoint {
        self.final_graph.densities()
    }
}

/// Runs a chain, recording densities at step 0 and every `thin` steps.
pub fn run(config: &SamplerConfig) -> Result<Trajectory> {
    let mut s = Sampler::new(config)?;
    let record = |s: &Sampler| {
        let (e, t) = s.densities_f64();
        TrajectoryRecord { step: s.steps, e, t, accepted_frac: s.acceptance_rate() }
    };
    let mut records = Vec::with_capacity((config.steps / config.thin) as usize + 1);
    records.push(record(&s));
    for step in 1..=config.steps {
        s.step();
        if step % config.thin == 0 {
            records.push(record(&s));
        }
    }
    Ok(Trajectory {
        config: *config,
        acceptance_rate: s.acceptance_rate(),
        records,
        final_graph: s.into_graph(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{enumerate_support, exact_family};

    fn cfg(n: usize, beta: (f64, f64), steps: u64, init: Init) -> SamplerConfig {
        SamplerConfig { n, beta, steps, seed: 7, init, thin: 1 }
    }

    #[test]
    fn log_weight_examples() {
        assert_eq!(log_weight(&Graph::empty(5).unwrap(), (3.0, 4.0)), 0.0);
        assert_eq!(log_weight(&Graph::complete(6).unwrap(), (1.0, 0.0)), 30.0);
        let g = turan_graph(30, 4).unwrap();
        let (e, t) = (g.edge_count() as f64, g.triangle_count() as f64);
        assert_eq!((e, t), (337.0, 1680.0));
        assert!((log_weight(&g, (80.0, -40.0)) - (2.0 * 80.0 * e - 6.0 * 40.0 / 30.0 * t)).abs() < 1e-9);
    }

    #[test]
    fn delta_example() {
        // adding an edge with c common neighbors at β = (0, -1), n = 10
        for c in 0..5 {
            assert!((delta_log_weight(10, (0.0, -1.0), 1, c) + 0.6 * c as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_beta_accepts_everything() {
        let t = run(&cfg(8, (0.0, 0.0), 1000, Init::Random(0.5))).unwrap();
        assert_eq!(t.acceptance_rate, 1.0);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(run(&cfg(5, (0.0, 0.0), 0, Init::Empty)), Err(Error::Config(_))));
        assert!(run(&SamplerConfig { thin: 0, ..cfg(5, (0.0, 0.0), 1, Init::Empty) }).is_err());
        assert!(run(&cfg(5, (0.0, 0.0), 1, Init::Turan(6))).is_err());
        assert!(run(&cfg(5, (0.0, 0.0), 1, Init::Random(1.5))).is_err());
        assert!(run(&cfg(1, (0.0, 0.0), 1, Init::Empty)).is_err());
        assert!(run(&cfg(5, (f64::NAN, 0.0), 1, Init::Empty)).is_err());
    }

    #[test]
    fn trajectory_shape_and_determinism() {
        let c = SamplerConfig { thin: 7, ..cfg(10, (0.2, -0.3), 100, Init::Random(0.3)) };
        let a = run(&c).unwrap();
        assert_eq!(a.records.len(), 100 / 7 + 1);
        assert_eq!(a.records[0].step, 0);
        let b = run(&c).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.final_graph, b.final_graph);
        let other = run(&SamplerConfig { seed: 8, ..c }).unwrap();
        assert_ne!(a.records, other.records);
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("step,e,t,accepted_frac\n0,"));
    }

    #[test]
    fn running_counts_track_graph() {
        let mut s = Sampler::new(&cfg(12, (0.1, -0.4), 1, Init::Random(0.5))).unwrap();
        for _ in 0..5000 {
            s.step();
        }
        assert_eq!(s.counts(), (s.graph().edge_count(), s.graph().triangle_count()));
    }

    #[test]
    fn stream_is_pinned() {
        let mut s = Stream::new(42);
        let first: Vec<u64> = (0..3).map(|_| s.below(1000)).collect();
        let mut t = Stream::new(42);
        assert_eq!(first, (0..3).map(|_| t.below(1000)).collect::<Vec<_>>());
        let u = Stream::new(1).uniform();
        assert!((0.0..1.0).contains(&u));
    }

    #[test]
    fn independent_edges_at_zero_triangle_weight() {
        let b1: f64 = 0.5;
        let mut s = Sampler::new(&SamplerConfig { seed: 3, ..cfg(20, (b1, 0.0), 1, Init::Empty) }).unwrap();
        for _ in 0..50_000 {
            s.step();
        }
        let (mut sum, m) = (0.0, 200_000);
        for _ in 0..m {
            s.step();
            sum += s.counts().0 as f64;
        }
        let p = (2.0 * b1).exp() / (1.0 + (2.0 * b1).exp());
        assert!((sum / m as f64 / 190.0 - p).abs() < 0.01);
    }

    #[test]
    fn small_graph_law_matches_exact_family() {
        let beta = (0.3, -0.2);
        let mut s = Sampler::new(&SamplerConfig { seed: 11, ..cfg(4, beta, 1, Init::Empty) }).unwrap();
        let table = enumerate_support(4).unwrap();
        let fam = exact_family(&table, beta).unwrap();
        let mut hist = std::collections::BTreeMap::new();
        let m = 400_000;
        for _ in 0..m {
            s.step();
            *hist.entry(s.counts()).or_insert(0u64) += 1;
        }
        let tv: f64 = table
            .entries()
            .map(|(e, t, _)| {
                let emp = *hist.get(&(e, t)).unwrap_or(&0) as f64 / m as f64;
                (emp - fam.distribution.prob(&DensityPoint::from_counts(4, e, t))).abs()
            })
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.02, "tv = {tv}");
    }
}
