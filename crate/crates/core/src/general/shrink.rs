use std::collections::VecDeque;

use rand::Rng;
use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::forest::{compose, forest_to_cycles, shrink_large_cycles_pinned, LargeCycleParams};
use crate::graph::{Graph, GraphError, Labeling, Mapping, VertexId};
use crate::ns;
use crate::runtime::{Key, KvTable, Simulator};
use crate::util::{derive_seed, item_rng};

use super::{contract, to_degree3, GeneralError};

const STREAM_RANK: u64 = 0x4752_4e4b;
const STREAM_ROOTED: u64 = 0x524f_4f54;

/// Parent pointers produced by the rank-limited searches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperEdgeForest {
    parent: Vec<Option<VertexId>>,
}

impl SuperEdgeForest {
    pub fn new(parent: Vec<Option<VertexId>>) -> Result<Self, GraphError> {
        let n = parent.len();
        if let Some(&bad) = parent.iter().flatten().find(|&&p| p as usize >= n) {
            return Err(GraphError::VertexOutOfRange { vertex: bad as u64, n });
        }
        Ok(SuperEdgeForest { parent })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v as usize]
    }

    pub fn roots(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.len() as VertexId).filter(|&v| self.parent(v).is_none())
    }
}

/// Largest admissible search budget, `floor(c * sqrt(S))` and at least 1.
pub fn max_t(local_space: u64, c: f64) -> u64 {
    ((c * (local_space as f64).sqrt()).floor() as u64).max(1)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ShrinkStats {
    pub t: u64,
    pub g3_vertices: usize,
    pub g3_edges: usize,
    pub roots: usize,
    /// Vertices explored by the search from each vertex of the
    /// degree-3 graph, the start included.
    pub explored: Vec<u32>,
    pub rounds: usize,
    pub reads: u64,
}

#[derive(Clone, Debug)]
pub struct ShrinkGeneralOutput {
    pub graph: Graph,
    /// Input vertices to vertices of `graph`.
    pub mapping: Mapping,
    pub forest: SuperEdgeForest,
    /// Ranks of the degree-3 vertices; ties go to the smaller id.
    pub ranks: Vec<u64>,
    pub stats: ShrinkStats,
}

/// Shrinks `g` while preserving its components.
///
/// Works on the degree-3 transform of `g`. Every vertex draws a uniform
/// rank and searches breadth-first, neighbors in ascending id order, until
/// it has explored `t` vertices, exhausted its component, or reached a
/// vertex of lower rank; in the last case that vertex becomes its parent,
/// even when it was the `t`-th one. Trees of the parent forest are then
/// contracted.
pub fn shrink_general(
    sim: &mut Simulator,
    g: &Graph,
    t: u64,
    c: f64,
    seed: u64,
) -> Result<ShrinkGeneralOutput, GeneralError> {
    let max = max_t(sim.config().local_space, c);
    if t < 1 || t > max {
        return Err(GeneralError::InvalidT { t, max });
    }
    let first_round = sim.rounds();
    let d3 = to_degree3(sim, g)?;
    let g3 = &d3.graph;
    let rank_seed = derive_seed(seed, STREAM_RANK, 0);
    let tasks = sim.tasks(g3.vertices());

    let ranked = sim.round(&KvTable::new(), &tasks, |m, task| {
        for &v in &task.work_items {
            m.write(Key::unit(ns::RANK, v), item_rng(rank_seed, v).gen::<u64>())?;
        }
        Ok(())
    })?;
    let ranks: Vec<u64> = g3
        .vertices()
        .map(|v| ranked.get(&Key::unit(ns::RANK, v)).unwrap_or(0))
        .collect();

    let mut input = g3.to_table();
    input.extend(ranked)?;
    let (out, explored) = sim.round_with(&input, &tasks, |m, task| {
        let mut explored = Vec::with_capacity(task.work_items.len());
        let mut seen = FxHashSet::default();
        let mut queue = VecDeque::new();
        for &v in &task.work_items {
            let own = (m.read_present(Key::unit(ns::RANK, v))?, v);
            let mut count = 1u64;
            let mut parent = None;
            seen.clear();
            queue.clear();
            seen.insert(v);
            queue.push_back(v);
            'search: while count < t {
                let Some(x) = queue.pop_front() else { break };
                let d = m.read_present(Key::unit(ns::DEG, x))? as u32;
                for slot in 0..d {
                    let y = m.read_present(Key::new(ns::ADJ, x, slot))? as VertexId;
                    if !seen.insert(y) {
                        continue;
                    }
                    count += 1;
                    if (m.read_present(Key::unit(ns::RANK, y))?, y) < own {
                        parent = Some(y);
                        break 'search;
                    }
                    if count == t {
                        break 'search;
                    }
                    queue.push_back(y);
                }
            }
            if let Some(p) = parent {
                m.write(Key::unit(ns::PARENT, v), p as u64)?;
            }
            explored.push((v, count as u32));
        }
        Ok(explored)
    })?;
    let mut per_start = vec![0u32; g3.n()];
    for (v, c) in explored.into_iter().flatten() {
        per_start[v as usize] = c;
    }
    let mut parent = vec![None; g3.n()];
    for (k, p) in out.namespace(ns::PARENT) {
        parent[k.a as usize] = Some(p as VertexId);
    }
    let forest = SuperEdgeForest::new(parent)?;

    let labels = rooted_forest_cc(sim, &forest, seed)?;
    let classes = Mapping::from_labeling(&labels);
    let graph = contract(sim, g3, &classes)?;
    let mapping = d3.mapping.then(&classes)?;

    let history = &sim.history()[first_round..];
    let stats = ShrinkStats {
        t,
        g3_vertices: g3.n(),
        g3_edges: g3.m(),
        roots: forest.roots().count(),
        explored: per_start,
        rounds: history.len(),
        reads: history.iter().map(|h| h.reads).sum(),
    };
    Ok(ShrinkGeneralOutput {
        graph,
        mapping,
        forest,
        ranks,
        stats,
    })
}

/// Labels every vertex of a rooted forest by its root.
///
/// Each tree becomes a cycle through its Euler tour with the root's first
/// copy pinned. Cycles are shortened to at most `S / 12` vertices, which
/// keeps exactly one pinned vertex per cycle, and each pinned vertex then
/// walks its cycle and writes the root as the label of every member.
pub fn rooted_forest_cc(sim: &mut Simulator, f: &SuperEdgeForest, seed: u64) -> Result<Labeling, GeneralError> {
    let n = f.len();
    let mut edges = Vec::new();
    for v in 0..n as VertexId {
        if let Some(p) = f.parent(v) {
            edges.push((v, p));
        }
    }
    let tree = Graph::new(n, edges).map_err(|e| match e {
        GraphError::SelfLoop(v) => GeneralError::CycleDetected(format!("vertex {v} is its own parent")),
        GraphError::DuplicateEdge(a, b) => {
            GeneralError::CycleDetected(format!("vertices {a} and {b} point at each other"))
        }
        other => other.into(),
    })?;
    if n == 0 {
        return Ok(Labeling::new(Vec::new()));
    }
    let fc = forest_to_cycles(sim, &tree)?;
    let mut pins = vec![false; fc.cycles.len()];
    for r in f.roots() {
        pins[fc.mapping.get(r) as usize] = true;
    }
    let target = (sim.config().local_space / 12).max(2) as usize;
    let params = LargeCycleParams {
        target_len: target,
        mark_prob: 1.0 / target as f64,
        walk_cap: 3 * target,
        applications: 8,
        retry_batches: 3,
    };
    let large = shrink_large_cycles_pinned(sim, &fc.cycles, &params, &pins, derive_seed(seed, STREAM_ROOTED, 0))?;
    let to_cycle = fc.mapping.then(&large.mapping)?;
    let cycles = &large.cycles;

    let mut input = cycles.to_table();
    let mut pinned = Vec::new();
    for r in f.roots() {
        let img = to_cycle.get(r);
        input.insert(Key::unit(ns::VERTEX, img), r as u64);
        pinned.push(img);
    }
    let tasks = sim.tasks(pinned.iter().copied());
    let out = sim.round(&input, &tasks, |m, task| {
        for &p in &task.work_items {
            let root = m.read_present(Key::unit(ns::VERTEX, p))?;
            m.write(Key::unit(ns::LABEL, p), root)?;
            let mut w = m.read(Key::unit(ns::SUCC, p))?.map_or(p, |s| s as VertexId);
            while w != p {
                m.write(Key::unit(ns::LABEL, w), root)?;
                w = m.read_present(Key::unit(ns::SUCC, w))? as VertexId;
            }
        }
        Ok(())
    })?;

    let mut labels = vec![None; cycles.len()];
    for (k, l) in out.namespace(ns::LABEL) {
        labels[k.a as usize] = Some(l);
    }
    if let Some(v) = (0..n as VertexId).find(|&v| labels[to_cycle.get(v) as usize].is_none()) {
        return Err(GeneralError::CycleDetected(format!("vertex {v} reaches no root")));
    }
    let on_cycles = Labeling::new(labels.into_iter().map(|l| l.unwrap_or(u64::MAX)).collect());
    Ok(compose(sim, &on_cycles, &to_cycle)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_graph, oracle_labeling, partitions_equal, GraphFamily};
    use crate::runtime::ModelConfig;

    fn sim() -> Simulator {
        Simulator::new(ModelConfig::new(64, 1 << 12, 1 << 30, true).unwrap())
    }

    fn pulled_back(g: &Graph, out: &ShrinkGeneralOutput) -> Labeling {
        let l = oracle_labeling(&out.graph);
        Labeling::new(g.vertices().map(|v| l.get(out.mapping.get(v))).collect())
    }

    #[test]
    fn budget_one_keeps_every_vertex() {
        let g = gen_graph(&GraphFamily::Gnm { n: 60, m: 100 }, 2).unwrap();
        let out = shrink_general(&mut sim(), &g, 1, 1.0, 5).unwrap();
        assert_eq!(out.stats.roots, out.stats.g3_vertices);
        assert_eq!(out.graph.n(), out.stats.g3_vertices);
        assert_eq!(out.graph.m(), out.stats.g3_edges);
        assert!(out.stats.explored.iter().all(|&c| c == 1));
    }

    #[test]
    fn single_edge_has_one_root_for_both_rank_orders() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let mut orders = FxHashSet::default();
        for seed in 0..16 {
            let out = shrink_general(&mut sim(), &g, 2, 1.0, seed).unwrap();
            assert_eq!((out.graph.n(), out.graph.m()), (1, 0));
            orders.insert(out.ranks[0] < out.ranks[1]);
        }
        assert_eq!(orders.len(), 2);
    }

    #[test]
    fn invalid_budgets() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        // S = 4096, so sqrt(S) = 64
        assert!(matches!(
            shrink_general(&mut sim(), &g, 0, 1.0, 0),
            Err(GeneralError::InvalidT { t: 0, max: 64 })
        ));
        assert!(shrink_general(&mut sim(), &g, 65, 1.0, 0).is_err());
        assert!(shrink_general(&mut sim(), &g, 64, 1.0, 0).is_ok());
        assert!(shrink_general(&mut sim(), &g, 128, 2.0, 0).is_ok());
    }

    #[test]
    fn super_edges_point_to_lower_ranks_and_shrinking_is_exact() {
        for seed in 0..6 {
            let g = gen_graph(&GraphFamily::Gnm { n: 500, m: 700 }, seed).unwrap();
            let out = shrink_general(&mut sim(), &g, 8, 1.0, seed + 100).unwrap();
            for v in 0..out.forest.len() as VertexId {
                if let Some(p) = out.forest.parent(v) {
                    assert!((out.ranks[p as usize], p) < (out.ranks[v as usize], v));
                }
            }
            assert!(out.graph.n() < out.stats.g3_vertices);
            assert!(partitions_equal(&pulled_back(&g, &out), &oracle_labeling(&g)).unwrap());
        }
    }

    #[test]
    fn rooted_forest_examples() {
        let star = SuperEdgeForest::new(vec![None, Some(0), Some(0), Some(0)]).unwrap();
        let l = rooted_forest_cc(&mut sim(), &star, 1).unwrap();
        assert_eq!(l.as_slice(), &[0, 0, 0, 0]);

        let chains = SuperEdgeForest::new(vec![None, Some(0), Some(1), None, Some(3), Some(4)]).unwrap();
        let l = rooted_forest_cc(&mut sim(), &chains, 1).unwrap();
        assert_eq!(l.as_slice(), &[0, 0, 0, 3, 3, 3]);

        let swap = SuperEdgeForest::new(vec![Some(1), Some(0)]).unwrap();
        assert!(matches!(
            rooted_forest_cc(&mut sim(), &swap, 1),
            Err(GeneralError::CycleDetected(_))
        ));
        let ring = SuperEdgeForest::new(vec![Some(1), Some(2), Some(0), None]).unwrap();
        assert!(matches!(
            rooted_forest_cc(&mut sim(), &ring, 1),
            Err(GeneralError::CycleDetected(_))
        ));
    }

    #[test]
    fn rooted_forest_matches_oracle_on_random_forest() {
        let g = gen_graph(&GraphFamily::RandomForest { trees: 40, n: 10_000 }, 3).unwrap();
        // orient every tree towards its smallest vertex
        let truth = oracle_labeling(&g);
        let smallest = truth.canonical();
        let mut parent = vec![None; g.n()];
        let mut seen = vec![false; g.n()];
        for r in g.vertices() {
            if smallest.get(r) != r as u64 || seen[r as usize] {
                continue;
            }
            seen[r as usize] = true;
            let mut queue = VecDeque::from([r]);
            while let Some(x) = queue.pop_front() {
                for &y in g.neighbors(x) {
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        parent[y as usize] = Some(x);
                        queue.push_back(y);
                    }
                }
            }
        }
        let f = SuperEdgeForest::new(parent).unwrap();
        assert_eq!(f.roots().count(), 40);
        let l = rooted_forest_cc(&mut sim(), &f, 7).unwrap();
        assert!(partitions_equal(&l, &truth).unwrap());
        assert!(f.roots().all(|r| l.get(r) == r as u64));
    }
}
