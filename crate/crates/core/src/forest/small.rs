use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::graph::{Mapping, VertexId};
use crate::ns;
use crate::runtime::{Key, Machine, RuntimeError, Simulator};
use crate::util::{derive_seed, item_rng, pack, unpack};

use super::{sample_rank, CycleSet, ForestError};

const STREAM_RANK: u64 = 0x5241_4e4b;

/// Outcome of Step 2 on one cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Step2Cycle {
    /// Length after Step 1.
    pub len: usize,
    /// Vertices that left the alive set.
    pub removed: usize,
}

/// Measurements of one ranked shrinking iteration.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SmallCycleMetrics {
    pub b: u64,
    pub alive_before: usize,
    pub alive_after_step1: usize,
    pub alive_after: usize,
    pub rounds: usize,
    pub reads: u64,
    pub writes: u64,
    pub peak_live_words: u64,
    /// Cycle vertices queried by each alive vertex during the Step-1
    /// traversal, both directions together.
    pub step1_queries: Vec<u32>,
    pub step2_cycles: Vec<Step2Cycle>,
    /// Absorptions performed by leaders, summed over both steps.
    pub absorb_writes: u64,
    /// Distinct vertices absorbed; equal to `absorb_writes` iff no vertex
    /// was absorbed twice.
    pub absorbed: u64,
}

#[derive(Clone, Debug)]
pub struct SmallCycleOutput {
    pub cycles: CycleSet,
    pub mapping: Mapping,
    pub metrics: SmallCycleMetrics,
}

/// One ranked shrinking iteration with rank budget `b`.
///
/// Step 1: every alive vertex draws a rank from the truncated geometric
/// distribution and probes both directions until it returns to itself or
/// meets a rank at least its own, stamping each visited vertex with its
/// rank. Vertices whose stamp does not exceed their rank hold the cycle
/// maximum; each of them owns the lower-rank segments for which it is the
/// larger-id endpoint, and a vertex that went all the way around owns its
/// whole cycle. Step 2: on the contracted cycles, every vertex scans its
/// `16b`-hop neighborhood; the top id of a fully covered cycle contracts the
/// cycle, and otherwise a vertex that is the top id of its neighborhood
/// contracts its `4b`-hop neighborhood.
pub fn shrink_small_cycles(
    sim: &mut Simulator,
    cs: &CycleSet,
    b: u64,
    seed: u64,
) -> Result<SmallCycleOutput, ForestError> {
    if b == 0 {
        return Err(ForestError::InvalidConfig("rank budget must be positive".into()));
    }
    let first_round = sim.rounds();
    let alive: Vec<VertexId> = cs.alive().collect();
    let tasks = sim.tasks(alive.iter().copied());
    let rank_seed = derive_seed(seed, STREAM_RANK, 0);

    // ranks
    let ranked = sim.round(&cs.to_table(), &tasks, |m, task| {
        for &v in &task.work_items {
            let succ = m.read_present(Key::unit(ns::SUCC, v))? as u32;
            let pred = m.read_present(Key::unit(ns::PRED, v))? as u32;
            let r = sample_rank(b, &mut item_rng(rank_seed, v)).min(u32::MAX as u64) as u32;
            m.write(Key::unit(ns::NODE_SUCC, v), pack(succ, r))?;
            m.write(Key::unit(ns::NODE_PRED, v), pack(pred, r))?;
        }
        Ok(())
    })?;

    // Step 1 probes and stamps
    let (probed, queries) = sim.round_with(&ranked, &tasks, |m, task| {
        let mut queries = Vec::with_capacity(task.work_items.len());
        for &v in &task.work_items {
            let (succ, r) = unpack(m.read_present(Key::unit(ns::NODE_SUCC, v))?);
            let (pred, _) = unpack(m.read_present(Key::unit(ns::NODE_PRED, v))?);
            let mut q = 0u32;
            for (dir, ns_dir, start) in [(0, ns::NODE_SUCC, succ), (1, ns::NODE_PRED, pred)] {
                let mut w = start;
                let end = loop {
                    if w == v {
                        break v;
                    }
                    let (next, rw) = unpack(m.read_present(Key::unit(ns_dir, w))?);
                    q += 1;
                    m.write_max(Key::unit(ns::STAMP, w), r as u64)?;
                    if rw >= r {
                        break w;
                    }
                    w = next;
                };
                m.write(Key::new(ns::REACH, v, dir), end as u64)?;
            }
            queries.push((v, q));
        }
        Ok(queries)
    })?;
    let mut step1_queries = vec![0u32; cs.len()];
    for (v, q) in queries.into_iter().flatten() {
        step1_queries[v as usize] = q;
    }
    let step1_queries: Vec<u32> = alive.iter().map(|&v| step1_queries[v as usize]).collect();

    // Step 1 contraction by the top-rank vertices
    let mut input = ranked;
    input.extend(probed)?;
    let (out1, absorbed1) = sim.round_with(&input, &tasks, |m, task| {
        let mut absorbed = 0u64;
        for &v in &task.work_items {
            let stamp = m.read(Key::unit(ns::STAMP, v))?.unwrap_or(0);
            let (succ, r) = unpack(m.read_present(Key::unit(ns::NODE_SUCC, v))?);
            if stamp > r as u64 {
                continue;
            }
            let fwd = m.read_present(Key::new(ns::REACH, v, 0))? as VertexId;
            let bwd = m.read_present(Key::new(ns::REACH, v, 1))? as VertexId;
            if fwd == v {
                absorbed += absorb_run(m, v, succ, v, ns::NODE_SUCC)?;
                m.write(Key::unit(ns::NEW_SUCC, v), v as u64)?;
                m.write(Key::unit(ns::NEW_PRED, v), v as u64)?;
                continue;
            }
            if v > fwd {
                absorbed += absorb_run(m, v, succ, fwd, ns::NODE_SUCC)?;
            }
            if v > bwd {
                let (pred, _) = unpack(m.read_present(Key::unit(ns::NODE_PRED, v))?);
                absorbed += absorb_run(m, v, pred, bwd, ns::NODE_PRED)?;
            }
            m.write(Key::unit(ns::NEW_SUCC, v), fwd as u64)?;
            m.write(Key::unit(ns::NEW_PRED, v), bwd as u64)?;
        }
        Ok(absorbed)
    })?;
    let absorbed_rep1 = out1.namespace(ns::REP).count() as u64;
    let (cs1, map1) = cs.contract(&out1)?;
    let alive_after_step1 = cs1.alive_count();

    // Step 2 on the contracted cycles
    let step2 = step2_contract(sim, &cs1, b)?;

    let history = &sim.history()[first_round..];
    let metrics = SmallCycleMetrics {
        b,
        alive_before: alive.len(),
        alive_after_step1,
        alive_after: step2.cycles.alive_count(),
        rounds: history.len(),
        reads: history.iter().map(|h| h.reads).sum(),
        writes: history.iter().map(|h| h.writes).sum(),
        peak_live_words: history.iter().map(|h| h.peak_live_words).max().unwrap_or(0),
        step1_queries,
        step2_cycles: step2.per_cycle,
        absorb_writes: absorbed1.iter().sum::<u64>() + step2.absorb_writes,
        absorbed: absorbed_rep1 + step2.absorbed,
    };
    Ok(SmallCycleOutput {
        cycles: step2.cycles,
        mapping: map1.then(&step2.mapping)?,
        metrics,
    })
}

/// Walks from `start` in the direction stored under `dir` until `stop`,
/// absorbing every vertex on the way into `leader`.
fn absorb_run(
    m: &mut Machine<'_>,
    leader: VertexId,
    start: VertexId,
    stop: VertexId,
    dir: u16,
) -> Result<u64, RuntimeError> {
    let mut w = start;
    let mut count = 0;
    while w != stop {
        m.write(Key::unit(ns::REP, w), leader as u64)?;
        count += 1;
        w = unpack(m.read_present(Key::unit(dir, w))?).0;
    }
    Ok(count)
}

/// Result of [`step2_contract`].
#[derive(Clone, Debug)]
pub struct Step2Output {
    pub cycles: CycleSet,
    pub mapping: Mapping,
    /// One entry per alive input cycle.
    pub per_cycle: Vec<Step2Cycle>,
    pub absorb_writes: u64,
    pub absorbed: u64,
}

/// The deterministic second step on its own: one round in which every
/// alive vertex scans its `16b`-hop neighborhood.
pub fn step2_contract(sim: &mut Simulator, cs: &CycleSet, b: u64) -> Result<Step2Output, ForestError> {
    if b == 0 {
        return Err(ForestError::InvalidConfig("rank budget must be positive".into()));
    }
    let alive: Vec<VertexId> = cs.alive().collect();
    if alive.is_empty() {
        return Ok(Step2Output {
            cycles: cs.clone(),
            mapping: Mapping::identity(cs.len()),
            per_cycle: Vec::new(),
            absorb_writes: 0,
            absorbed: 0,
        });
    }
    let hops = b.saturating_mul(16).min(cs.len() as u64) as usize;
    let reach = 4 * b.min(cs.len() as u64) as usize;
    let tasks = sim.tasks(alive.iter().copied());
    let (out, absorbed) = sim.round_with(&cs.to_table(), &tasks, |m, task| {
        let mut absorbed = 0u64;
        for &v in &task.work_items {
            absorbed += step2_vertex(m, v, hops, reach)?;
        }
        Ok(absorbed)
    })?;
    let reps = out.namespace(ns::REP).count() as u64;
    let (next, map) = cs.contract(&out)?;

    let mut per_cycle = Vec::new();
    for cycle in cs.cycles() {
        let image = map.get(cycle[0]);
        let survivors = if next.is_alive(image) {
            let set: FxHashSet<VertexId> = cycle.iter().map(|&v| map.get(v)).collect();
            set.len()
        } else {
            0
        };
        per_cycle.push(Step2Cycle {
            len: cycle.len(),
            removed: cycle.len() - survivors,
        });
    }
    Ok(Step2Output {
        cycles: next,
        mapping: map,
        per_cycle,
        absorb_writes: absorbed.iter().sum(),
        absorbed: reps,
    })
}

fn step2_vertex(m: &mut Machine<'_>, v: VertexId, hops: usize, reach: usize) -> Result<u64, RuntimeError> {
    let mut fwd = Vec::with_capacity(hops);
    let mut w = v;
    let mut looped = false;
    for _ in 0..hops {
        w = m.read_present(Key::unit(ns::SUCC, w))? as VertexId;
        if w == v {
            looped = true;
            break;
        }
        fwd.push(w);
    }
    if looped {
        // the forward scan alone covers the cycle
        return contract_whole(m, v, &fwd);
    }
    let mut bwd = Vec::with_capacity(hops);
    w = v;
    for _ in 0..hops {
        w = m.read_present(Key::unit(ns::PRED, w))? as VertexId;
        bwd.push(w);
    }
    let fwd_set: FxHashSet<VertexId> = fwd.iter().copied().collect();
    let last_b = *bwd.last().expect("hops >= 16");
    let beyond = m.read_present(Key::unit(ns::SUCC, *fwd.last().expect("hops >= 16")))? as VertexId;
    if fwd_set.contains(&last_b) || last_b == beyond {
        let mut all = fwd;
        all.extend(bwd.into_iter().filter(|w| !fwd_set.contains(w)));
        return contract_whole(m, v, &all);
    }
    let top = fwd.iter().chain(&bwd).all(|&w| w < v);
    if !top {
        return Ok(0);
    }
    for &w in fwd[..reach].iter().chain(&bwd[..reach]) {
        m.write(Key::unit(ns::REP, w), v as u64)?;
    }
    let (far_f, far_b) = (fwd[reach], bwd[reach]);
    m.write(Key::unit(ns::NEW_SUCC, v), far_f as u64)?;
    m.write(Key::unit(ns::NEW_PRED, far_f), v as u64)?;
    m.write(Key::unit(ns::NEW_PRED, v), far_b as u64)?;
    m.write(Key::unit(ns::NEW_SUCC, far_b), v as u64)?;
    Ok(2 * reach as u64)
}

/// `v` sees its whole cycle (`others` lists every other vertex); the top id
/// contracts it into a finished singleton.
fn contract_whole(m: &mut Machine<'_>, v: VertexId, others: &[VertexId]) -> Result<u64, RuntimeError> {
    if others.iter().any(|&w| w > v) {
        return Ok(0);
    }
    for &w in others {
        m.write(Key::unit(ns::REP, w), v as u64)?;
    }
    m.write(Key::unit(ns::NEW_SUCC, v), v as u64)?;
    m.write(Key::unit(ns::NEW_PRED, v), v as u64)?;
    Ok(others.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::large::cycle_partition;
    use crate::graph::{partitions_equal, Labeling};
    use crate::runtime::ModelConfig;

    fn sim() -> Simulator {
        Simulator::new(ModelConfig::new(8, 1 << 30, 1 << 30, false).unwrap())
    }

    fn pulled_back(cs: &CycleSet, out: &SmallCycleOutput) -> Labeling {
        let after = cycle_partition(&out.cycles);
        Labeling::new((0..cs.len() as u32).map(|v| after.get(out.mapping.get(v))).collect())
    }

    #[test]
    fn zero_budget_is_rejected() {
        let cs = CycleSet::uniform(1, 5);
        assert!(matches!(
            shrink_small_cycles(&mut sim(), &cs, 0, 1),
            Err(ForestError::InvalidConfig(_))
        ));
    }

    #[test]
    fn preserves_cycle_partition() {
        let cs = CycleSet::from_cycles(&[vec![4, 0, 9, 2], vec![1, 7, 3, 8, 5, 6, 10, 11, 12]]).unwrap();
        for b in [1, 2, 5] {
            for seed in 0..20 {
                let out = shrink_small_cycles(&mut sim(), &cs, b, seed).unwrap();
                assert!(partitions_equal(&pulled_back(&cs, &out), &cycle_partition(&cs)).unwrap());
                assert!(out.metrics.alive_after < cs.alive_count());
                // Step 2 is skipped once Step 1 finished every cycle
                assert!((3..=4).contains(&out.metrics.rounds));
            }
        }
    }

    #[test]
    fn short_cycles_vanish_in_one_iteration() {
        // every cycle fits inside one Step-2 scan
        let cs = CycleSet::uniform(30, 12);
        let out = shrink_small_cycles(&mut sim(), &cs, 1, 3).unwrap();
        assert_eq!(out.metrics.alive_after, 0);
        assert_eq!(out.cycles.len(), 30);
    }

    #[test]
    fn step2_removes_enough_and_absorbs_disjointly() {
        for b in [1u64, 2, 4] {
            for len in [2usize, 17, 40, 300, 1000] {
                let cs = CycleSet::uniform(3, len);
                let out = shrink_small_cycles(&mut sim(), &cs, b, len as u64 + b).unwrap();
                for c in &out.metrics.step2_cycles {
                    assert!(c.removed >= (8 * b as usize).min(c.len), "b={b} {c:?}");
                }
                assert_eq!(out.metrics.absorb_writes, out.metrics.absorbed);
                assert_eq!(out.metrics.step1_queries.len(), 3 * len);
            }
        }
    }

    #[test]
    fn step2_alone_on_every_short_length() {
        for b in [1u64, 4] {
            for len in 2..=80usize {
                let cs = CycleSet::uniform(2, len);
                let out = step2_contract(&mut sim(), &cs, b).unwrap();
                assert_eq!(out.per_cycle.len(), 2);
                for c in &out.per_cycle {
                    assert_eq!(c.len, len);
                    assert!(c.removed >= (8 * b as usize).min(len), "b={b} len={len} {c:?}");
                }
                assert_eq!(out.absorb_writes, out.absorbed);
            }
        }
    }

    #[test]
    fn seeds_only_change_cost() {
        let cs = CycleSet::uniform(5, 200);
        let a = shrink_small_cycles(&mut sim(), &cs, 3, 1).unwrap();
        let b = shrink_small_cycles(&mut sim(), &cs, 3, 2).unwrap();
        let c = shrink_small_cycles(&mut sim(), &cs, 3, 1).unwrap();
        assert_eq!(a.mapping, c.mapping);
        assert_eq!(a.metrics.step1_queries, c.metrics.step1_queries);
        assert!(partitions_equal(&pulled_back(&cs, &a), &pulled_back(&cs, &b)).unwrap());
    }
}
