use crate::graph::{Graph, Mapping, VertexId};
use crate::ns;
use crate::runtime::{Key, KvTable, Simulator};
use crate::util::{pack, unpack};

use super::ForestError;

/// A collection of vertex-disjoint cycles over the vertices `0..len`.
///
/// A vertex with `succ(v) == v` is a finished singleton; every other vertex
/// is alive and lies on a cycle of length at least two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleSet {
    succ: Vec<VertexId>,
    pred: Vec<VertexId>,
}

impl CycleSet {
    /// Builds a cycle set from a successor permutation.
    pub fn from_succ(succ: Vec<VertexId>) -> Result<CycleSet, ForestError> {
        let n = succ.len();
        let mut pred = vec![VertexId::MAX; n];
        for (v, &s) in succ.iter().enumerate() {
            let slot = pred
                .get_mut(s as usize)
                .ok_or_else(|| ForestError::Inconsistent(format!("succ({v}) = {s} out of range")))?;
            if *slot != VertexId::MAX {
                return Err(ForestError::Inconsistent(format!("{s} has two predecessors")));
            }
            *slot = v as VertexId;
        }
        Ok(CycleSet { succ, pred })
    }

    /// Disjoint cycles given as vertex sequences; ids are assigned in order.
    pub fn from_cycles(cycles: &[Vec<VertexId>]) -> Result<CycleSet, ForestError> {
        let n: usize = cycles.iter().map(Vec::len).sum();
        let mut succ = vec![VertexId::MAX; n];
        for c in cycles {
            for (i, &v) in c.iter().enumerate() {
                let next = c[(i + 1) % c.len()];
                let slot = succ
                    .get_mut(v as usize)
                    .ok_or_else(|| ForestError::Inconsistent(format!("vertex {v} out of range")))?;
                *slot = next;
            }
        }
        Self::from_succ(succ)
    }

    /// `count` disjoint cycles of length `len`, numbered consecutively.
    pub fn uniform(count: usize, len: usize) -> CycleSet {
        let succ = (0..count * len)
            .map(|v| ((v / len) * len + (v % len + 1) % len) as VertexId)
            .collect();
        Self::from_succ(succ).expect("uniform cycles form a permutation")
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    #[inline]
    pub fn succ(&self, v: VertexId) -> VertexId {
        self.succ[v as usize]
    }

    #[inline]
    pub fn pred(&self, v: VertexId) -> VertexId {
        self.pred[v as usize]
    }

    #[inline]
    pub fn is_alive(&self, v: VertexId) -> bool {
        self.succ[v as usize] != v
    }

    pub fn alive(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.len() as VertexId).filter(|&v| self.is_alive(v))
    }

    pub fn alive_count(&self) -> usize {
        self.alive().count()
    }

    /// Alive cycles, each listed in successor order from its smallest id.
    pub fn cycles(&self) -> Vec<Vec<VertexId>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for v in self.alive() {
            if seen[v as usize] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut w = v;
            loop {
                seen[w as usize] = true;
                cycle.push(w);
                w = self.succ(w);
                if w == v {
                    break;
                }
            }
            out.push(cycle);
        }
        out
    }

    pub fn max_cycle_len(&self) -> usize {
        self.cycles().iter().map(Vec::len).max().unwrap_or(1)
    }

    /// Component labeling read off the cycles (the smallest id of each cycle).
    pub fn component_labels(&self) -> Vec<u64> {
        let mut label: Vec<u64> = (0..self.len() as u64).collect();
        for c in self.cycles() {
            for &v in &c {
                label[v as usize] = c[0] as u64;
            }
        }
        label
    }

    /// `SUCC(v)` and `PRED(v)` for every alive vertex.
    pub fn to_table(&self) -> KvTable {
        let mut t = KvTable::with_capacity(2 * self.len());
        for v in self.alive() {
            t.insert(Key::unit(ns::SUCC, v), self.succ(v) as u64);
            t.insert(Key::unit(ns::PRED, v), self.pred(v) as u64);
        }
        t
    }

    /// Applies a contraction written by a round and renumbers survivors.
    ///
    /// `out` holds `REP(w) = leader` for every absorbed vertex and
    /// `NEW_SUCC`/`NEW_PRED` for survivors whose neighbors changed. Survivors
    /// keep their relative order, so id comparisons stay meaningful.
    pub(crate) fn contract(&self, out: &KvTable) -> Result<(CycleSet, Mapping), ForestError> {
        let n = self.len();
        let mut rep: Vec<VertexId> = (0..n as VertexId).collect();
        for (k, v) in out.namespace(ns::REP) {
            rep[k.a as usize] = v as VertexId;
        }
        let mut dense = vec![VertexId::MAX; n];
        let mut next = 0;
        for v in 0..n {
            if rep[v] == v as VertexId {
                dense[v] = next;
                next += 1;
            }
        }
        let mut succ = vec![0; next as usize];
        for v in 0..n as VertexId {
            if rep[v as usize] != v {
                continue;
            }
            let s = out
                .get(&Key::unit(ns::NEW_SUCC, v))
                .map_or(self.succ(v), |w| w as VertexId);
            let ds = dense[s as usize];
            if ds == VertexId::MAX {
                return Err(ForestError::Inconsistent(format!(
                    "survivor {v} points at absorbed vertex {s}"
                )));
            }
            succ[dense[v as usize] as usize] = ds;
        }
        let result = CycleSet::from_succ(succ)?;
        for (k, p) in out.namespace(ns::NEW_PRED) {
            let (dv, dp) = (dense[k.a as usize], dense[p as usize]);
            if dv == VertexId::MAX || result.pred(dv) != dp {
                return Err(ForestError::Inconsistent(format!(
                    "NEW_PRED({}) = {p} disagrees with successors",
                    k.a
                )));
            }
        }
        let mapping = Mapping::new(rep.iter().map(|&r| dense[r as usize]).collect(), next as usize)?;
        Ok((result, mapping))
    }
}

/// Result of the Euler-tour reduction of a forest.
#[derive(Clone, Debug)]
pub struct ForestCycles {
    pub cycles: CycleSet,
    /// Original vertex of every split vertex.
    pub origin: Vec<VertexId>,
    /// Each original vertex to its first split copy.
    pub mapping: Mapping,
}

/// Splits every vertex of degree `d` into `d` copies so that each tree on
/// `k > 1` vertices becomes one cycle of length `2k - 2`.
///
/// Copy `v^i` enters `v` along the edge to its `i`-th neighbor `u` and
/// leaves along the edge to neighbor `i + 1 (mod d)`. Isolated vertices get
/// one copy that forms a finished singleton. One round; each split vertex
/// binary-searches its successor's adjacency list.
pub fn forest_to_cycles(sim: &mut Simulator, g: &Graph) -> Result<ForestCycles, ForestError> {
    let mut base = Vec::with_capacity(g.n() + 1);
    let mut total = 0u32;
    for v in g.vertices() {
        base.push(total);
        total += g.degree(v).max(1) as u32;
    }
    let mut input = g.to_table();
    let mut origin = Vec::with_capacity(total as usize);
    for v in g.vertices() {
        input.insert(Key::unit(ns::OFFSET, v), base[v as usize] as u64);
        for i in 0..g.degree(v).max(1) {
            input.insert(Key::unit(ns::VERTEX, base[v as usize] + i as u32), pack(v, i as u32));
            origin.push(v);
        }
    }

    let tasks = sim.tasks(0..total);
    let out = sim.round(&input, &tasks, |m, task| {
        for &s in &task.work_items {
            let (v, i) = unpack(m.read_present(Key::unit(ns::VERTEX, s))?);
            let d = m.read_present(Key::unit(ns::DEG, v))? as u32;
            if d == 0 {
                continue;
            }
            let u = m.read_present(Key::new(ns::ADJ, v, (i + 1) % d))? as VertexId;
            let du = m.read_present(Key::unit(ns::DEG, u))? as u32;
            let bu = m.read_present(Key::unit(ns::OFFSET, u))? as u32;
            let (mut lo, mut hi) = (0u32, du);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if (m.read_present(Key::new(ns::ADJ, u, mid))? as VertexId) < v {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            let t = bu + lo;
            m.write(Key::unit(ns::SUCC, s), t as u64)?;
            m.write(Key::unit(ns::PRED, t), s as u64)?;
        }
        Ok(())
    })?;

    let mut succ: Vec<VertexId> = (0..total).collect();
    for (k, t) in out.namespace(ns::SUCC) {
        succ[k.a as usize] = t as VertexId;
    }
    let cycles = CycleSet::from_succ(succ)?;
    for (k, s) in out.namespace(ns::PRED) {
        if cycles.pred(k.a) != s as VertexId {
            return Err(ForestError::Inconsistent(format!("PRED({}) disagrees", k.a)));
        }
    }
    let mapping = Mapping::new(base, total as usize)?;
    Ok(ForestCycles {
        cycles,
        origin,
        mapping,
    })
}
