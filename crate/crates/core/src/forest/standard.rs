use rand::Rng;

use crate::graph::{Labeling, VertexId};
use crate::ns;
use crate::runtime::{Key, Simulator};
use crate::util::{derive_seed, item_rng};

use super::{CycleSet, ForestError};

const STREAM_STANDARD: u64 = 0x5354_4443;

/// Labels every cycle by its minimum-rank vertex.
///
/// Each alive vertex draws a uniform 64-bit rank (ties broken by id) and
/// walks forward until it meets a strictly smaller rank. The cycle minimum
/// comes back to itself having seen every vertex and writes its id as the
/// label of the whole cycle. Singletons keep their own id.
pub fn standard_cycle_cc(sim: &mut Simulator, cs: &CycleSet, seed: u64) -> Result<Labeling, ForestError> {
    let mut labels: Vec<u64> = (0..cs.len() as u64).collect();
    let alive: Vec<VertexId> = cs.alive().collect();
    if alive.is_empty() {
        return Ok(Labeling::new(labels));
    }
    let rank_seed = derive_seed(seed, STREAM_STANDARD, 0);
    let tasks = sim.tasks(alive.iter().copied());

    let mut ranked = sim.round(&cs.to_table(), &tasks, |m, task| {
        for &v in &task.work_items {
            let succ = m.read_present(Key::unit(ns::SUCC, v))?;
            m.write(Key::unit(ns::NODE_SUCC, v), succ)?;
            m.write(Key::unit(ns::RANK, v), item_rng(rank_seed, v).gen::<u64>())?;
        }
        Ok(())
    })?;
    ranked.retain(|k, _| k.ns == ns::NODE_SUCC || k.ns == ns::RANK);

    let out = sim.round(&ranked, &tasks, |m, task| {
        let mut seen = Vec::new();
        for &v in &task.work_items {
            let own = (m.read_present(Key::unit(ns::RANK, v))?, v);
            let mut w = m.read_present(Key::unit(ns::NODE_SUCC, v))? as VertexId;
            seen.clear();
            seen.push(v);
            let is_min = loop {
                if w == v {
                    break true;
                }
                let rw = m.read_present(Key::unit(ns::RANK, w))?;
                if (rw, w) < own {
                    break false;
                }
                seen.push(w);
                w = m.read_present(Key::unit(ns::NODE_SUCC, w))? as VertexId;
            };
            if is_min {
                for &x in &seen {
                    m.write(Key::unit(ns::LABEL, x), v as u64)?;
                }
            }
        }
        Ok(())
    })?;
    for (k, l) in out.namespace(ns::LABEL) {
        labels[k.a as usize] = l;
    }
    Ok(Labeling::new(labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::partitions_equal;
    use crate::runtime::ModelConfig;

    fn sim() -> Simulator {
        Simulator::new(ModelConfig::new(8, 1 << 20, 1 << 20, true).unwrap())
    }

    #[test]
    fn single_cycle_of_seven() {
        let cs = CycleSet::uniform(1, 7);
        let l = standard_cycle_cc(&mut sim(), &cs, 3).unwrap();
        assert_eq!(l.class_count(), 1);
        assert_eq!(l.len(), 7);
    }

    #[test]
    fn three_cycles_of_five_match_cycle_partition() {
        let cs = CycleSet::uniform(3, 5);
        for seed in 0..10 {
            let mut s = sim();
            let l = standard_cycle_cc(&mut s, &cs, seed).unwrap();
            assert_eq!(l.class_count(), 3);
            assert!(partitions_equal(&l, &Labeling::new(cs.component_labels())).unwrap());
            assert_eq!(s.rounds(), 2);
        }
    }

    #[test]
    fn singletons_keep_their_ids() {
        let cs = CycleSet::from_cycles(&[vec![0], vec![1, 2], vec![3]]).unwrap();
        let l = standard_cycle_cc(&mut sim(), &cs, 0).unwrap();
        assert_eq!(l.get(0), 0);
        assert_eq!(l.get(3), 3);
        assert_eq!(l.get(1), l.get(2));
    }
}
