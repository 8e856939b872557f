use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::Mapping;
use crate::ns;
use crate::runtime::{Key, Simulator};
use crate::util::{derive_seed, item_rng, pack, unpack};

use super::{CycleSet, ForestError};

const STREAM_LARGE: u64 = 0x4c41_5247;

/// Parameters of the large-cycle shrinking step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LargeCycleParams {
    /// Target maximum cycle length `L`.
    pub target_len: usize,
    /// Probability that a vertex is marked in one application.
    pub mark_prob: f64,
    /// Maximum number of vertices a marked vertex absorbs per application.
    pub walk_cap: usize,
    /// Applications in one batch.
    pub applications: usize,
    /// Extra reseeded batches before giving up.
    pub retry_batches: usize,
}

impl LargeCycleParams {
    /// Defaults for an input of `n` vertices: `L = ceil(n^(eps/2))`, marking
    /// probability `n^(-eps/2)`, walk cap `ceil(4 n^(eps/2) ln n)` and
    /// `ceil(2/eps)` applications per batch.
    pub fn new(n: usize, epsilon: f64) -> Self {
        let root = (n.max(2) as f64).powf(epsilon / 2.0);
        // guard against powf landing just above an integer
        let mut p = Self::with_target(n, epsilon, (root - 1e-9).ceil() as usize);
        p.mark_prob = 1.0 / root;
        p
    }

    /// Same schedule with an explicit target length `L`; marks are drawn
    /// with probability `1/L`.
    pub fn with_target(n: usize, epsilon: f64, target_len: usize) -> Self {
        let target_len = target_len.max(1);
        let ln_n = (n.max(2) as f64).ln();
        LargeCycleParams {
            target_len,
            mark_prob: 1.0 / target_len as f64,
            walk_cap: (4.0 * target_len as f64 * ln_n).ceil() as usize,
            applications: (2.0 / epsilon).ceil().max(1.0) as usize,
            retry_batches: 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LargeCycleOutput {
    pub cycles: CycleSet,
    /// Input vertices to output vertices.
    pub mapping: Mapping,
    pub applications: usize,
    /// Images of the pinned vertices (empty when none were pinned).
    pub pinned: Vec<bool>,
}

/// Shortens every cycle to at most `params.target_len` vertices.
///
/// Each application marks vertices at random; every marked vertex walks
/// forward absorbing unmarked vertices until it meets the next mark or hits
/// the walk cap. Applications repeat until no cycle exceeds the target.
pub fn shrink_large_cycles(
    sim: &mut Simulator,
    cs: &CycleSet,
    params: &LargeCycleParams,
    seed: u64,
) -> Result<LargeCycleOutput, ForestError> {
    shrink_large_cycles_pinned(sim, cs, params, &[], seed)
}

/// Variant in which `pinned` vertices are always marked, so they are never
/// absorbed and every cycle that holds one keeps it.
pub fn shrink_large_cycles_pinned(
    sim: &mut Simulator,
    cs: &CycleSet,
    params: &LargeCycleParams,
    pinned: &[bool],
    seed: u64,
) -> Result<LargeCycleOutput, ForestError> {
    if !pinned.is_empty() && pinned.len() != cs.len() {
        return Err(crate::graph::GraphError::DomainMismatch {
            expected: cs.len(),
            found: pinned.len(),
        }
        .into());
    }
    let budget = params.applications * (1 + params.retry_batches);
    let mut cur = cs.clone();
    let mut mapping = Mapping::identity(cs.len());
    let mut pinned = pinned.to_vec();
    let mut applications = 0;
    loop {
        let longest = cur.max_cycle_len();
        if longest <= params.target_len {
            break;
        }
        if applications == budget {
            return Err(ForestError::ShrinkRetryExhausted {
                longest,
                target: params.target_len,
                applications,
            });
        }
        let app_seed = derive_seed(seed, STREAM_LARGE, applications as u64);
        let (next, step) = apply_once(sim, &cur, params, &pinned, app_seed)?;
        if !pinned.is_empty() {
            let mut moved = vec![false; next.len()];
            for (v, _) in pinned.iter().enumerate().filter(|(_, &p)| p) {
                moved[step.get(v as u32) as usize] = true;
            }
            pinned = moved;
        }
        mapping = mapping.then(&step)?;
        cur = next;
        applications += 1;
    }
    Ok(LargeCycleOutput {
        cycles: cur,
        mapping,
        applications,
        pinned,
    })
}

fn apply_once(
    sim: &mut Simulator,
    cs: &CycleSet,
    params: &LargeCycleParams,
    pinned: &[bool],
    seed: u64,
) -> Result<(CycleSet, Mapping), ForestError> {
    let mut input = cs.to_table();
    for (v, _) in pinned.iter().enumerate().filter(|(_, &p)| p) {
        if cs.is_alive(v as u32) {
            input.insert(Key::unit(ns::MARK, v as u32), 1);
        }
    }
    let has_pins = !pinned.is_empty();
    let alive: Vec<u32> = cs.alive().collect();
    let tasks = sim.tasks(alive.iter().copied());

    // marks
    let marked = sim.round(&input, &tasks, |m, task| {
        for &v in &task.work_items {
            let succ = m.read_present(Key::unit(ns::SUCC, v))? as u32;
            let pin = has_pins && m.read(Key::unit(ns::MARK, v))?.is_some();
            let mark = pin || item_rng(seed, v).gen_bool(params.mark_prob);
            m.write(Key::unit(ns::NODE_SUCC, v), pack(succ, mark as u32))?;
        }
        Ok(())
    })?;

    // walks
    let cap = params.walk_cap;
    let out = sim.round(&marked, &tasks, |m, task| {
        for &v in &task.work_items {
            let (succ, mark) = unpack(m.read_present(Key::unit(ns::NODE_SUCC, v))?);
            if mark == 0 {
                continue;
            }
            let mut w = succ;
            let mut absorbed = 0usize;
            let end = loop {
                if w == v {
                    break v;
                }
                let (next, w_mark) = unpack(m.read_present(Key::unit(ns::NODE_SUCC, w))?);
                if w_mark != 0 || absorbed == cap {
                    break w;
                }
                m.write(Key::unit(ns::REP, w), v as u64)?;
                absorbed += 1;
                w = next;
            };
            if absorbed > 0 {
                m.write(Key::unit(ns::NEW_SUCC, v), end as u64)?;
                m.write(Key::unit(ns::NEW_PRED, end), v as u64)?;
            }
        }
        Ok(())
    })?;
    cs.contract(&out)
}

/// Partition of a cycle set's vertices into cycles, as a labeling.
#[cfg(test)]
pub(crate) fn cycle_partition(cs: &CycleSet) -> crate::graph::Labeling {
    crate::graph::Labeling::new(cs.component_labels())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{partitions_equal, Labeling};
    use crate::runtime::ModelConfig;

    fn sim() -> Simulator {
        Simulator::new(ModelConfig::new(16, 1 << 30, 1 << 30, false).unwrap())
    }

    fn pulled_back(cs: &CycleSet, out: &LargeCycleOutput) -> Labeling {
        let after = cycle_partition(&out.cycles);
        Labeling::new((0..cs.len() as u32).map(|v| after.get(out.mapping.get(v))).collect())
    }

    #[test]
    fn default_parameters() {
        let p = LargeCycleParams::new(100_000, 0.05);
        assert_eq!(p.target_len, 2);
        assert_eq!(p.applications, 40);
        assert!((p.mark_prob - 100_000f64.powf(-0.025)).abs() < 1e-12);
        let q = LargeCycleParams::new(100_000, 0.8);
        assert_eq!(q.target_len, 100);
        assert_eq!(q.applications, 3);
        assert_eq!(q.walk_cap, (400.0 * 100_000f64.ln()).ceil() as usize);
    }

    #[test]
    fn short_cycles_are_left_alone() {
        let cs = CycleSet::uniform(10, 5);
        let p = LargeCycleParams::with_target(50, 0.5, 5);
        let mut s = sim();
        let out = shrink_large_cycles(&mut s, &cs, &p, 1).unwrap();
        assert_eq!(out.applications, 0);
        assert_eq!(s.rounds(), 0);
        assert!(partitions_equal(&pulled_back(&cs, &out), &cycle_partition(&cs)).unwrap());
    }

    #[test]
    fn shrinks_and_preserves_partition() {
        let cs = CycleSet::uniform(4, 3000);
        let p = LargeCycleParams::with_target(12_000, 0.5, 20);
        for seed in 0..3 {
            let out = shrink_large_cycles(&mut sim(), &cs, &p, seed).unwrap();
            assert!(out.cycles.max_cycle_len() <= 20);
            assert!(out.applications >= 1);
            assert!(partitions_equal(&pulled_back(&cs, &out), &cycle_partition(&cs)).unwrap());
        }
    }

    #[test]
    fn pinned_vertices_survive() {
        let cs = CycleSet::uniform(3, 400);
        let pins: Vec<bool> = (0..1200).map(|v| v % 400 == 17).collect();
        let p = LargeCycleParams::with_target(1200, 0.5, 4);
        let out = shrink_large_cycles_pinned(&mut sim(), &cs, &p, &pins, 9).unwrap();
        assert_eq!(out.pinned.iter().filter(|&&b| b).count(), 3);
        for c in 0..3u32 {
            let image = out.mapping.get(c * 400 + 17);
            assert!(out.pinned[image as usize]);
            // every vertex of the cycle lands in the pinned vertex's cycle
            let lab = cycle_partition(&out.cycles);
            for v in c * 400..(c + 1) * 400 {
                assert_eq!(lab.get(out.mapping.get(v)), lab.get(image));
            }
        }
    }

    #[test]
    fn exhausted_retries_are_reported() {
        let cs = CycleSet::uniform(1, 1000);
        let mut p = LargeCycleParams::with_target(1000, 0.5, 10);
        p.mark_prob = 0.0;
        p.retry_batches = 0;
        match shrink_large_cycles(&mut sim(), &cs, &p, 0) {
            Err(ForestError::ShrinkRetryExhausted {
                longest,
                target,
                applications,
            }) => {
                assert_eq!((longest, target, applications), (1000, 10, 4));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
