//! Deterministic Turán mode check and the multi-start figure experiments.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ln_nu_turan;
use crate::graph::{turan_counts, turan_densities, turan_graph, PartitionFit};
use crate::mcmc::{delta_log_weight, Init, Sampler, SamplerConfig, RNG_ALGORITHM};

/// Relative tolerance for reporting ties between Turán scores.
pub const MODE_TIE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModeScore {
    pub r: usize,
    /// `log_weight(T(n, r), β)`.
    pub log_weight: f64,
    /// `ln ν(T(n, r))`.
    pub log_count: f64,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeCheck {
    pub n: usize,
    pub beta: (f64, f64),
    pub scores: Vec<ModeScore>,
    pub r_star: usize,
    /// Class counts whose score ties the best within [`MODE_TIE_TOL`].
    pub score_ties: Vec<usize>,
    /// Class counts whose weight alone ties the best weight; when this has
    /// more than one entry the count term decided the mode.
    pub weight_ties: Vec<usize>,
}

fn ties(vals: &[(usize, f64)]) -> Vec<usize> {
    let best = vals.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    vals.iter()
        .filter(|v| best - v.1 <= MODE_TIE_TOL * best.abs().max(1.0))
        .map(|v| v.0)
        .collect()
}

/// Scores every Turán graph `T(n, r)` by its weight plus log labeled count.
pub fn turan_mode_check(n: usize, beta: (f64, f64)) -> Result<ModeCheck> {
    if n < 2 {
        return Err(Error::Domain(format!("mode check needs n >= 2, got {n}")));
    }
    if !beta.0.is_finite() || !beta.1.is_finite() {
        return Err(Error::Domain("beta must be finite".into()));
    }
    let scores = (1..=n)
        .map(|r| {
            let (e, t) = turan_counts(n, r)?;
            let log_weight = 2.0 * beta.0 * e as f64 + 6.0 * beta.1 * t as f64 / n as f64;
            let log_count = ln_nu_turan(n, r)?;
            Ok(ModeScore { r, log_weight, log_count, score: log_weight + log_count })
        })
        .collect::<Result<Vec<_>>>()?;
    let r_star = scores
        .iter()
        .max_by(|a, b| a.score.total_cmp(&b.score))
        .map(|s| s.r)
        .expect("n >= 2");
    let score_ties = ties(&scores.iter().map(|s| (s.r, s.score)).collect::<Vec<_>>());
    let weight_ties = ties(&scores.iter().map(|s| (s.r, s.log_weight)).collect::<Vec<_>>());
    Ok(ModeCheck { n, beta, scores, r_star, score_ties, weight_ties })
}

/// The four simulated figures: a base `β`, a ray `o` and a radius `r`, all on
/// 30 nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FigurePreset {
    Fig4,
    Fig2,
    Fig3_1,
    Fig3_2,
}

impl FigurePreset {
    pub const ALL: [FigurePreset; 4] = [FigurePreset::Fig4, FigurePreset::Fig2, FigurePreset::Fig3_1, FigurePreset::Fig3_2];

    pub fn name(&self) -> &'static str {
        match self {
            FigurePreset::Fig4 => "fig4",
            FigurePreset::Fig2 => "fig2",
            FigurePreset::Fig3_1 => "fig3_1",
            FigurePreset::Fig3_2 => "fig3_2",
        }
    }

    /// `(base β, direction o, radius r)`.
    pub fn ray(&self) -> ((f64, f64), (f64, f64), f64) {
        match self {
            FigurePreset::Fig4 => ((0.0, 0.0), (1.0, -0.5), 80.0),
            FigurePreset::Fig2 => ((20.0, -80.0), (1.0, -0.75), 40.0),
            FigurePreset::Fig3_1 => ((0.0, 0.0), (1.0, -0.75), 40.0),
            FigurePreset::Fig3_2 => ((10.0, -6.0), (1.0, -0.75), 40.0),
        }
    }

    /// `β + r·o`.
    pub fn beta(&self) -> (f64, f64) {
        let (b, o, r) = self.ray();
        (b.0 + r * o.0, b.1 + r * o.1)
    }

    /// Turán class count predicted by the asymptotic classification.
    pub fn predicted_classes(&self) -> usize {
        match self {
            FigurePreset::Fig4 => 4,
            FigurePreset::Fig2 => 2,
            FigurePreset::Fig3_1 | FigurePreset::Fig3_2 => 3,
        }
    }

    pub const NODES: usize = 30;
}

impl std::str::FromStr for FigurePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigurePreset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown figure preset `{s}` (fig4, fig2, fig3_1, fig3_2)")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub init: String,
    pub seed: u64,
    pub acceptance_rate: f64,
    pub final_point: (f64, f64),
    /// Distance from the final point to `t(T(n, j+1))` for `j = 0..n`.
    pub distances: Vec<f64>,
    /// Class count of the nearest Turán point.
    pub nearest_classes: usize,
    /// Largest distance from the predicted Turán point seen at any step.
    pub max_excursion: f64,
    pub partition: PartitionFit,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FigureReport {
    pub preset: FigurePreset,
    pub n: usize,
    pub beta: (f64, f64),
    pub steps: u64,
    pub rng: &'static str,
    pub mode_check: ModeCheck,
    pub chains: Vec<ChainReport>,
}

impl FigureReport {
    /// The chain started at the predicted Turán graph.
    pub fn predicted_chain(&self) -> Option<&ChainReport> {
        let want = Init::Turan(self.preset.predicted_classes()).to_string();
        self.chains.iter().find(|c| c.init == want)
    }
}

/// Starting states of the multi-start experiment.
pub fn harness_inits() -> Vec<Init> {
    let mut v = vec![Init::Empty, Init::Complete];
    v.extend((2..=6).map(Init::Turan));
    v
}

/// Runs a chain for `steps` steps, tracking the farthest excursion from `target`.
pub fn run_tracked(config: &SamplerConfig, target: (f64, f64)) -> Result<(Sampler, f64)> {
    let mut s = Sampler::new(config)?;
    let dist = |p: (f64, f64)| (p.0 - target.0).hypot(p.1 - target.1);
    let mut max_excursion = dist(s.densities_f64());
    for _ in 0..config.steps {
        if s.step() {
            max_excursion = max_excursion.max(dist(s.densities_f64()));
        }
    }
    Ok((s, max_excursion))
}

/// Mode check plus one chain per start in [`harness_inits`], run in parallel
/// with seeds `seed + index` and reported in start order.
pub fn figure_harness(preset: FigurePreset, steps: u64, seed: u64) -> Result<FigureReport> {
    let n = FigurePreset::NODES;
    let beta = preset.beta();
    let mode_check = turan_mode_check(n, beta)?;
    let target = turan_densities(n, preset.predicted_classes())?.to_f64();
    let turan_points = (1..=n).map(|r| turan_densities(n, r).map(|p| p.to_f64())).collect::<Result<Vec<_>>>()?;
    let chains = harness_inits()
        .into_par_iter()
        .enumerate()
        .map(|(i, init)| {
            let config = SamplerConfig { n, beta, steps, seed: seed.wrapping_add(i as u64), init, thin: steps };
            let (s, max_excursion) = run_tracked(&config, target)?;
            let p = s.densities_f64();
            let distances: Vec<f64> = turan_points.iter().map(|v| (p.0 - v.0).hypot(p.1 - v.1)).collect();
            let nearest = (0..n).min_by(|&a, &b| distances[a].total_cmp(&distances[b])).expect("n >= 1");
            Ok(ChainReport {
                init: init.to_string(),
                seed: config.seed,
                acceptance_rate: s.acceptance_rate(),
                final_point: p,
                distances,
                nearest_classes: nearest + 1,
                max_excursion,
                partition: s.graph().partition_recovery(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FigureReport { preset, n, beta, steps, rng: RNG_ALGORITHM, mode_check, chains })
}

/// Log-weight change of every single-pair flip of `T(n, r)`; all negative
/// means the Turán graph is a strict local mode of the chain.
pub fn turan_flip_gains(n: usize, r: usize, beta: (f64, f64)) -> Result<Vec<f64>> {
    let g = turan_graph(n, r)?;
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let (de, dt) = g.flip_delta(i, j)?;
            out.push(delta_log_weight(n, beta, de, dt));
        }
    }
    Ok(out)
}
