//! Connected components of general graphs.
//!
//! Each call samples the edges, solves the sample recursively through a
//! shrinking step, contracts the input by the sample's components and
//! recurses once more on the contracted graph. Graphs small enough for one
//! machine are solved locally.

mod contract;
mod degree3;
mod sample;
mod shrink;

pub use contract::contract;
pub use degree3::{to_degree3, Degree3};
pub use sample::{sample_edges, sampling_probability};
pub use shrink::{max_t, rooted_forest_cc, shrink_general, ShrinkGeneralOutput, ShrinkStats, SuperEdgeForest};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::forest::{compose, ForestError};
use crate::graph::{Graph, GraphError, Labeling, Mapping, VertexId};
use crate::ns;
use crate::runtime::{ExecutionMode, Key, KvTable, MachineTask, ModelConfig, RoundMetrics, RuntimeError, Simulator};
use crate::util::{derive_seed, iter_log, log_star, pack, unpack};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeneralError {
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Forest(ForestError),
    #[error("search budget {t} outside [1, {max}]")]
    InvalidT { t: u64, max: u64 },
    #[error("parent pointers contain a cycle: {0}")]
    CycleDetected(String),
    #[error("recursion exceeded {cap} calls")]
    RecursionBudgetExceeded { cap: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl From<ForestError> for GeneralError {
    fn from(e: ForestError) -> Self {
        match e {
            ForestError::Runtime(r) => GeneralError::Runtime(r),
            ForestError::Graph(g) => GeneralError::Graph(g),
            other => GeneralError::Forest(other),
        }
    }
}

/// `EDGE(e) -> (u, v)` packed into one word.
pub(crate) fn edge_table(g: &Graph) -> KvTable {
    g.edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| (Key::unit(ns::EDGE, e as u32), pack(u, v)))
        .collect()
}

/// Parameters of a general-graph run. Unset fields are derived from the
/// input in [`GeneralRunConfig::resolve`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralRunConfig {
    /// Local space exponent, `S = n^delta`.
    pub delta: f64,
    /// Total space `T`; defaults to `m + n * ceil(log^(k) n)`.
    pub total_space: Option<u64>,
    /// Overrides `S`.
    pub local_space: Option<u64>,
    /// Trade-off parameter `k`; defaults to `log* n`.
    pub k_budget: Option<u32>,
    /// Graphs with `n + m` at most this are solved on one machine;
    /// defaults to `S / 2`.
    pub local_solve_threshold: Option<u64>,
    /// The constant in `t <= c * sqrt(S)`.
    pub t_const: f64,
    /// Maximum recursion calls; defaults to `64 * 2^k`.
    pub node_cap: Option<usize>,
    pub machine_slack: f64,
    pub enforce_quotas: bool,
    pub mode: ExecutionMode,
}

impl Default for GeneralRunConfig {
    fn default() -> Self {
        GeneralRunConfig {
            delta: 0.5,
            total_space: None,
            local_space: None,
            k_budget: None,
            local_solve_threshold: None,
            t_const: 1.0,
            node_cap: None,
            machine_slack: 64.0,
            enforce_quotas: true,
            mode: ExecutionMode::default(),
        }
    }
}

/// A [`GeneralRunConfig`] with every default filled in for one input.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResolvedGeneral {
    pub total_space: u64,
    pub local_space: u64,
    pub k_budget: u32,
    pub local_solve_threshold: u64,
    pub t_const: f64,
    pub node_cap: usize,
}

impl GeneralRunConfig {
    pub fn resolve(&self, n: usize, m: usize) -> Result<ResolvedGeneral, GeneralError> {
        let bad = |msg: String| Err(GeneralError::InvalidConfig(msg));
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta {} outside (0,1)", self.delta));
        }
        if self.t_const.is_nan() || self.t_const <= 0.0 {
            return bad("t_const must be positive".into());
        }
        let max_k = log_star(n as f64).max(1);
        let k = self.k_budget.unwrap_or(max_k);
        if k < 1 || k > max_k {
            return bad(format!("k_budget {k} outside [1, {max_k}]"));
        }
        let base = ModelConfig::for_input(n, m, self.delta, self.machine_slack, self.enforce_quotas)?;
        let s = self.local_space.unwrap_or(base.local_space);
        let t = self
            .total_space
            .unwrap_or(m as u64 + n as u64 * iter_log(k, n as f64).ceil() as u64);
        if t < (n + m) as u64 {
            return bad(format!("total space {t} below n + m = {}", n + m));
        }
        let cap = match self.node_cap {
            Some(c) => c,
            None => 64usize.saturating_mul(1usize.checked_shl(k).unwrap_or(usize::MAX)),
        };
        Ok(ResolvedGeneral {
            total_space: t,
            local_space: s,
            k_budget: k,
            local_solve_threshold: self.local_solve_threshold.unwrap_or(s / 2),
            t_const: self.t_const,
            node_cap: cap,
        })
    }

    fn model(&self, n: usize, m: usize, r: &ResolvedGeneral) -> Result<ModelConfig, GeneralError> {
        let machines = (((n + m).max(1) as f64 * self.machine_slack) / r.local_space as f64)
            .ceil()
            .max(1.0) as usize;
        Ok(ModelConfig::new(
            machines,
            r.local_space,
            r.total_space,
            self.enforce_quotas,
        )?)
    }
}

/// Search budget of a shrinking step on `n` vertices:
/// `min(2^sqrt(T/n), c * sqrt(S))`, computed without overflow.
pub fn choose_t(total_space: u64, n: usize, local_space: u64, c: f64) -> u64 {
    let exp = (total_space as f64 / n.max(1) as f64).sqrt();
    let wide = if exp >= 63.0 {
        u64::MAX
    } else {
        2f64.powf(exp).floor() as u64
    };
    wide.min(max_t(local_space, c)).max(1)
}

/// One call of the recursion. Rounds, reads and peak space cover the
/// call's own rounds, including its shrinking steps, but not its children.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecursionNode {
    pub node_id: usize,
    pub parent_id: Option<usize>,
    pub n: usize,
    pub m: usize,
    pub t_used: Option<u64>,
    pub rounds: usize,
    pub reads: u64,
    pub peak_live_words: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneralReport {
    pub n: usize,
    pub m: usize,
    pub config: ResolvedGeneral,
    pub nodes: Vec<RecursionNode>,
    pub rounds: usize,
    pub total_reads: u64,
    pub max_peak_live_words: u64,
    pub round_metrics: Vec<RoundMetrics>,
}

impl GeneralReport {
    /// The recursion tree as a JSON array.
    pub fn recursion_json(&self) -> String {
        serde_json::to_string_pretty(&self.nodes).expect("nodes serialize")
    }

    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        for node in &self.nodes {
            if let Some(p) = node.parent_id {
                depth[node.node_id] = depth[p] + 1;
            }
        }
        depth.into_iter().max().map_or(0, |d| d + 1)
    }
}

/// Labels the connected components of `g`. Exact for every seed.
pub fn connected_components(
    g: &Graph,
    cfg: &GeneralRunConfig,
    seed: u64,
) -> Result<(Labeling, GeneralReport), GeneralError> {
    let resolved = cfg.resolve(g.n(), g.m())?;
    let mut sim = Simulator::new(cfg.model(g.n(), g.m(), &resolved)?).with_mode(cfg.mode);
    run_general(&mut sim, g, &resolved, seed)
}

/// [`connected_components`] on a caller-provided simulator.
pub fn run_general(
    sim: &mut Simulator,
    g: &Graph,
    cfg: &ResolvedGeneral,
    seed: u64,
) -> Result<(Labeling, GeneralReport), GeneralError> {
    let first_round = sim.rounds();
    let mut rec = Recursion {
        sim,
        cfg: *cfg,
        nodes: Vec::new(),
    };
    let labels = rec.solve(g, None, seed)?;
    let nodes = rec.nodes;
    let history = sim_history(rec.sim, first_round);
    let report = GeneralReport {
        n: g.n(),
        m: g.m(),
        config: *cfg,
        nodes,
        rounds: history.len(),
        total_reads: history.iter().map(|h| h.reads).sum(),
        max_peak_live_words: history.iter().map(|h| h.peak_live_words).max().unwrap_or(0),
        round_metrics: history,
    };
    Ok((labels, report))
}

fn sim_history(sim: &Simulator, from: usize) -> Vec<RoundMetrics> {
    sim.history()[from..].to_vec()
}

const TAG_SAMPLE: u64 = 1;
const TAG_FIRST: u64 = 2;
const TAG_SECOND: u64 = 3;

struct Recursion<'a> {
    sim: &'a mut Simulator,
    cfg: ResolvedGeneral,
    nodes: Vec<RecursionNode>,
}

impl Recursion<'_> {
    /// Adds the rounds since `from` to node `id`.
    fn charge(&mut self, id: usize, from: usize) {
        let node = &mut self.nodes[id];
        for h in &self.sim.history()[from..] {
            node.rounds += 1;
            node.reads += h.reads;
            node.peak_live_words = node.peak_live_words.max(h.peak_live_words);
        }
    }

    /// Returns a labeling whose classes are named by their smallest vertex.
    fn solve(&mut self, g: &Graph, parent: Option<usize>, seed: u64) -> Result<Labeling, GeneralError> {
        let id = self.nodes.len();
        if id >= self.cfg.node_cap {
            return Err(GeneralError::RecursionBudgetExceeded { cap: self.cfg.node_cap });
        }
        self.nodes.push(RecursionNode {
            node_id: id,
            parent_id: parent,
            n: g.n(),
            m: g.m(),
            t_used: None,
            rounds: 0,
            reads: 0,
            peak_live_words: 0,
        });

        // isolated vertices are finished; only the rest recurses
        let keep: Vec<VertexId> = g.vertices().filter(|&v| g.degree(v) > 0).collect();
        if keep.is_empty() {
            return Ok(Labeling::singletons(g.n()));
        }
        let core = if keep.len() == g.n() {
            g.clone()
        } else {
            let mut index = vec![VertexId::MAX; g.n()];
            for (i, &v) in keep.iter().enumerate() {
                index[v as usize] = i as VertexId;
            }
            Graph::new(
                keep.len(),
                g.edges().iter().map(|&(u, v)| (index[u as usize], index[v as usize])),
            )?
        };

        let mut mark = self.sim.rounds();
        let inner = if (core.n() + core.m()) as u64 <= self.cfg.local_solve_threshold {
            let l = local_solve(self.sim, &core)?;
            self.charge(id, mark);
            l
        } else {
            let t = choose_t(self.cfg.total_space, core.n(), self.cfg.local_space, self.cfg.t_const);
            self.nodes[id].t_used = Some(t);
            let h = sample_edges(self.sim, &core, derive_seed(seed, TAG_SAMPLE, 0))?;
            self.charge(id, mark);
            let first = self.shrink_recurse(&h, t, id, derive_seed(seed, TAG_FIRST, 0))?;
            let classes = Mapping::from_labeling(&first);
            mark = self.sim.rounds();
            let contracted = contract(self.sim, &core, &classes)?;
            self.charge(id, mark);
            let second = self.shrink_recurse(&contracted, t, id, derive_seed(seed, TAG_SECOND, 0))?;
            mark = self.sim.rounds();
            let l = compose(self.sim, &second, &classes)?;
            self.charge(id, mark);
            l
        }
        .canonical();

        let mut labels: Vec<u64> = (0..g.n() as u64).collect();
        for (i, &v) in keep.iter().enumerate() {
            labels[v as usize] = keep[inner.get(i as VertexId) as usize] as u64;
        }
        Ok(Labeling::new(labels))
    }

    fn shrink_recurse(&mut self, g: &Graph, t: u64, owner: usize, seed: u64) -> Result<Labeling, GeneralError> {
        let mark = self.sim.rounds();
        let shrunk = shrink_general(self.sim, g, t, self.cfg.t_const, seed)?;
        self.charge(owner, mark);
        let child_seed = derive_seed(seed, TAG_SAMPLE, self.nodes.len() as u64);
        let labels = self.solve(&shrunk.graph, Some(owner), child_seed)?;
        let mark = self.sim.rounds();
        let out = compose(self.sim, &labels, &shrunk.mapping)?;
        self.charge(owner, mark);
        Ok(out)
    }
}

/// One machine reads every edge, runs union-find and writes all labels.
fn local_solve(sim: &mut Simulator, g: &Graph) -> Result<Labeling, GeneralError> {
    let tasks = [MachineTask {
        machine_id: 0,
        work_items: vec![0],
    }];
    let (n, m) = (g.n(), g.m());
    let out = sim.round(&edge_table(g), &tasks, |mach, _| {
        let mut uf = UnionFind::<VertexId>::new(n);
        for e in 0..m as u32 {
            let (u, v) = unpack(mach.read_present(Key::unit(ns::EDGE, e))?);
            uf.union(u, v);
        }
        for v in 0..n as VertexId {
            mach.write(Key::unit(ns::LABEL, v), uf.find(v) as u64)?;
        }
        Ok(())
    })?;
    let mut labels = vec![0u64; n];
    for (k, l) in out.namespace(ns::LABEL) {
        labels[k.a as usize] = l;
    }
    Ok(Labeling::new(labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_graph, oracle_labeling, partitions_equal, GraphFamily};

    #[test]
    fn small_graphs_are_solved_locally() {
        let g = gen_graph(&GraphFamily::Gnm { n: 20, m: 8 }, 1).unwrap();
        let (l, report) = connected_components(&g, &GeneralRunConfig::default(), 0).unwrap();
        assert!(partitions_equal(&l, &oracle_labeling(&g)).unwrap());
        assert_eq!(report.nodes.len(), 1);
        assert_eq!(report.rounds, 1);
    }

    #[test]
    fn edgeless_graph_needs_no_rounds() {
        let g = Graph::empty(5);
        let (l, report) = connected_components(&g, &GeneralRunConfig::default(), 0).unwrap();
        assert_eq!(l, Labeling::singletons(5));
        assert_eq!(report.rounds, 0);
    }

    #[test]
    fn recursion_matches_oracle() {
        for seed in 0..4 {
            let g = gen_graph(&GraphFamily::Gnm { n: 3000, m: 6000 }, seed).unwrap();
            let (l, report) = connected_components(&g, &GeneralRunConfig::default(), seed).unwrap();
            assert!(partitions_equal(&l, &oracle_labeling(&g)).unwrap());
            assert!(report.nodes.len() > 1);
            assert!(report.nodes[0].t_used.is_some());
            let own: usize = report.nodes.iter().map(|n| n.rounds).sum();
            assert_eq!(own, report.rounds);
        }
    }

    #[test]
    fn budget_choice() {
        // T/n = 4 gives 2^2
        assert_eq!(choose_t(400, 100, 10_000, 1.0), 4);
        assert_eq!(choose_t(1 << 40, 100, 10_000, 1.0), 100);
        assert_eq!(choose_t(u64::MAX, 1, 400, 1.0), 20);
    }

    #[test]
    fn config_checks() {
        let cfg = GeneralRunConfig {
            total_space: Some(10),
            ..GeneralRunConfig::default()
        };
        assert!(matches!(cfg.resolve(10, 5), Err(GeneralError::InvalidConfig(_))));
        let cfg = GeneralRunConfig {
            k_budget: Some(7),
            ..GeneralRunConfig::default()
        };
        assert!(cfg.resolve(100_000, 10).is_err());
        let r = GeneralRunConfig::default().resolve(100_000, 200_000).unwrap();
        assert_eq!(r.k_budget, 5);
        assert_eq!(r.node_cap, 64 * 32);
        assert_eq!(r.total_space, 300_000);
        assert_eq!(r.local_solve_threshold, r.local_space / 2);
    }

    #[test]
    fn tiny_cap_is_reported() {
        let g = gen_graph(&GraphFamily::Gnm { n: 2000, m: 4000 }, 0).unwrap();
        let cfg = GeneralRunConfig {
            node_cap: Some(2),
            ..GeneralRunConfig::default()
        };
        assert_eq!(
            connected_components(&g, &cfg, 0).unwrap_err(),
            GeneralError::RecursionBudgetExceeded { cap: 2 }
        );
    }
}
