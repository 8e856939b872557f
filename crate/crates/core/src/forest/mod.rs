//! Connected components of forests.
//!
//! The pipeline reduces each tree to a cycle, shortens long cycles, runs
//! ranked shrinking iterations with a growing rank budget until few
//! vertices remain, labels the leftover cycles directly and composes the
//! mappings back to the input vertices.

mod compose;
mod cycles;
mod large;
mod rank;
mod small;
mod standard;

pub use compose::compose;
pub use cycles::{forest_to_cycles, CycleSet, ForestCycles};
pub use large::{shrink_large_cycles, shrink_large_cycles_pinned, LargeCycleOutput, LargeCycleParams};
pub use rank::{rank_probability, sample_rank};
pub use small::{shrink_small_cycles, step2_contract, SmallCycleMetrics, SmallCycleOutput, Step2Cycle, Step2Output};
pub use standard::standard_cycle_cc;

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, GraphError, Labeling};
use crate::runtime::{ExecutionMode, ModelConfig, RoundMetrics, RuntimeError, Simulator};
use crate::util::{derive_seed, log2_bar, log_star, pow2_saturating, tower};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ForestError {
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cycle of length {longest} still exceeds {target} after {applications} applications")]
    ShrinkRetryExhausted {
        longest: usize,
        target: usize,
        applications: usize,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("inconsistent cycle structure: {0}")]
    Inconsistent(String),
}

/// Parameters of a forest run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestRunConfig {
    /// Local space exponent: machines hold `S = n^delta` words.
    pub delta: f64,
    /// Cycle-length exponent; `delta / 10`.
    pub epsilon: f64,
    /// Rank budget of the first iteration when `k_budget` is unset.
    pub initial_b: u64,
    /// Round/space trade-off: start from `B = 2^^(c log* n - k)`.
    pub k_budget: Option<u32>,
    /// The constant `c` in the trade-off start.
    pub tower_c: u32,
    /// Overrides the target cycle length of the large-cycle step.
    pub large_cycle_target: Option<usize>,
    /// Machines are sized so the input fills `1/slack` of their space.
    pub machine_slack: f64,
    pub enforce_quotas: bool,
    pub mode: ExecutionMode,
}

impl Default for ForestRunConfig {
    fn default() -> Self {
        Self::with_delta(0.5)
    }
}

impl ForestRunConfig {
    pub fn with_delta(delta: f64) -> Self {
        ForestRunConfig {
            delta,
            epsilon: delta / 10.0,
            initial_b: 100,
            k_budget: None,
            tower_c: 1,
            large_cycle_target: None,
            machine_slack: 64.0,
            enforce_quotas: true,
            mode: ExecutionMode::default(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), ForestError> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(ForestError::InvalidConfig(format!(
                "delta {} outside (0,1)",
                self.delta
            )));
        }
        if (self.epsilon - self.delta / 10.0).abs() > 1e-12 {
            return Err(ForestError::InvalidConfig("epsilon must equal delta/10".into()));
        }
        if self.initial_b == 0 {
            return Err(ForestError::InvalidConfig("initial_b must be positive".into()));
        }
        if let Some(k) = self.k_budget {
            let max = log_star(n as f64).max(1);
            if k < 1 || k > max {
                return Err(ForestError::InvalidConfig(format!("k_budget {k} outside [1, {max}]")));
            }
        }
        Ok(())
    }

    /// Rank budget of the first iteration.
    pub fn start_b(&self, n: usize) -> u64 {
        match self.k_budget {
            Some(k) => tower((self.tower_c * log_star(n as f64)).saturating_sub(k)),
            None => self.initial_b,
        }
    }

    /// Budget update applied after every second iteration:
    /// `min(2^B, eps log n / 100)`, floored and kept at least 1.
    pub fn next_b(&self, b: u64, n: usize) -> u64 {
        let cap = (self.epsilon * log2_bar(n as f64) / 100.0).floor() as u64;
        pow2_saturating(b).min(cap).max(1)
    }
}

/// One ranked shrinking iteration of a forest run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    #[serde(rename = "B")]
    pub b: u64,
    pub alive_before: usize,
    pub alive_after: usize,
    pub reads: u64,
    pub writes: u64,
    pub peak_live_words: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForestReport {
    pub n: usize,
    pub m: usize,
    pub split_vertices: usize,
    pub large_cycle_applications: usize,
    pub alive_after_large: usize,
    pub iterations: Vec<IterationRecord>,
    pub rounds: usize,
    pub total_reads: u64,
    pub max_peak_live_words: u64,
    pub round_metrics: Vec<RoundMetrics>,
}

impl ForestReport {
    /// Per-iteration records as a JSON array.
    pub fn iterations_json(&self) -> String {
        serde_json::to_string_pretty(&self.iterations).expect("records serialize")
    }
}

/// Labels the connected components of a forest.
///
/// The labeling is exact for every seed; randomness only affects cost.
pub fn connected_components_forest(
    g: &Graph,
    cfg: &ForestRunConfig,
    seed: u64,
) -> Result<(Labeling, ForestReport), ForestError> {
    cfg.validate(g.n())?;
    let model = ModelConfig::for_input(g.n(), g.m(), cfg.delta, cfg.machine_slack, cfg.enforce_quotas)?;
    let mut sim = Simulator::new(model).with_mode(cfg.mode);
    run_forest(&mut sim, g, cfg, seed)
}

/// [`connected_components_forest`] on a caller-provided simulator.
pub fn run_forest(
    sim: &mut Simulator,
    g: &Graph,
    cfg: &ForestRunConfig,
    seed: u64,
) -> Result<(Labeling, ForestReport), ForestError> {
    cfg.validate(g.n())?;
    let n = g.n();
    let first_round = sim.rounds();

    let fc = forest_to_cycles(sim, g)?;
    let params = match cfg.large_cycle_target {
        Some(l) => LargeCycleParams::with_target(n, cfg.epsilon, l),
        None => LargeCycleParams::new(n, cfg.epsilon),
    };
    let large = shrink_large_cycles(sim, &fc.cycles, &params, derive_seed(seed, 1, 0))?;
    let mut to_current = fc.mapping.then(&large.mapping)?;
    let mut current = large.cycles;
    let alive_after_large = current.alive_count();

    let threshold = n as f64 / log2_bar(n as f64);
    let mut b = cfg.start_b(n);
    let mut iterations = Vec::new();
    let mut alive = alive_after_large;
    while alive as f64 > threshold {
        let iteration = iterations.len() + 1;
        let out = shrink_small_cycles(sim, &current, b, derive_seed(seed, 2, iteration as u64))?;
        iterations.push(IterationRecord {
            iteration,
            b,
            alive_before: out.metrics.alive_before,
            alive_after: out.metrics.alive_after,
            reads: out.metrics.reads,
            writes: out.metrics.writes,
            peak_live_words: out.metrics.peak_live_words,
        });
        to_current = to_current.then(&out.mapping)?;
        current = out.cycles;
        alive = out.metrics.alive_after;
        if iteration % 2 == 0 {
            b = cfg.next_b(b, n);
        }
    }

    let labels = standard_cycle_cc(sim, &current, derive_seed(seed, 3, 0))?;
    let result = compose(sim, &labels, &to_current)?;

    let history = sim.history()[first_round..].to_vec();
    let report = ForestReport {
        n,
        m: g.m(),
        split_vertices: fc.cycles.len(),
        large_cycle_applications: large.applications,
        alive_after_large,
        iterations,
        rounds: history.len(),
        total_reads: history.iter().map(|h| h.reads).sum(),
        max_peak_live_words: history.iter().map(|h| h.peak_live_words).max().unwrap_or(0),
        round_metrics: history,
    };
    Ok((result, report))
}
