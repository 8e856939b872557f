//! Simple undirected graphs, labelings and vertex mappings.

mod generators;
mod io;
mod oracle;

pub use generators::{gen_graph, GraphFamily};
pub use io::{read_edge_list, read_labeling, write_edge_list, write_labeling};
pub use oracle::oracle_labeling;

use rustc_hash::FxHashMap;

use crate::ns;
use crate::runtime::{Key, KvTable};

pub type VertexId = u32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: u64, n: usize },
    #[error("domain mismatch: expected {expected} entries, found {found}")]
    DomainMismatch { expected: usize, found: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

/// A simple undirected graph on vertices `0..n`.
///
/// Edges are stored once in canonical `(min, max)` form and sorted; the
/// adjacency lists are sorted by neighbor id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
    offsets: Vec<usize>,
    adj: Vec<VertexId>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges and
    /// out-of-range endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Result<Graph, GraphError> {
        let mut canon = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w as usize >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w as u64, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self::from_sorted_canonical(n, canon))
    }

    /// Builds a graph after dropping self-loops and merging parallel edges.
    pub fn simplified(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Result<Graph, GraphError> {
        let mut canon = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w as usize >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w as u64, n });
                }
            }
            if u != v {
                canon.push((u.min(v), u.max(v)));
            }
        }
        canon.sort_unstable();
        canon.dedup();
        Ok(Self::from_sorted_canonical(n, canon))
    }

    fn from_sorted_canonical(n: usize, edges: Vec<(VertexId, VertexId)>) -> Graph {
        let mut offsets = vec![0usize; n + 1];
        for &(u, v) in &edges {
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut adj = vec![0; 2 * edges.len()];
        for &(u, v) in &edges {
            adj[fill[u as usize]] = v;
            fill[u as usize] += 1;
            adj[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        // edges are sorted by (min, max), so each list is already sorted
        // except for the interleaving of smaller and larger neighbors
        for v in 0..n {
            adj[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Graph { n, edges, offsets, adj }
    }

    pub fn empty(n: usize) -> Graph {
        Self::from_sorted_canonical(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    /// Position of `v`'s adjacency list in the flattened half-edge array.
    pub fn offset(&self, v: VertexId) -> usize {
        self.offsets[v as usize]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n as VertexId).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.n as VertexId
    }

    /// Table encoding: `DEG(v) -> degree` and `ADJ(v, slot) -> neighbor`.
    pub fn to_table(&self) -> KvTable {
        let mut t = KvTable::with_capacity(self.n + self.adj.len());
        self.encode_into(&mut t);
        t
    }

    pub fn encode_into(&self, t: &mut KvTable) {
        for v in self.vertices() {
            let nbrs = self.neighbors(v);
            t.insert(Key::unit(ns::DEG, v), nbrs.len() as u64);
            for (slot, &u) in nbrs.iter().enumerate() {
                t.insert(Key::new(ns::ADJ, v, slot as u32), u as u64);
            }
        }
    }

    /// Checks symmetry, simplicity and the degree-sum identity.
    pub fn check_invariants(&self) -> Result<(), GraphError> {
        let mut degree_sum = 0usize;
        for v in self.vertices() {
            let nbrs = self.neighbors(v);
            degree_sum += nbrs.len();
            for w in nbrs.windows(2) {
                if w[0] == w[1] {
                    return Err(GraphError::DuplicateEdge(v.min(w[0]), v.max(w[0])));
                }
            }
            for &u in nbrs {
                if u == v {
                    return Err(GraphError::SelfLoop(v));
                }
                if self.neighbors(u).binary_search(&v).is_err() {
                    return Err(GraphError::InvalidParams(format!(
                        "asymmetric adjacency between {v} and {u}"
                    )));
                }
            }
        }
        if degree_sum != 2 * self.m() {
            return Err(GraphError::InvalidParams("degree sum differs from 2m".into()));
        }
        Ok(())
    }

    /// Relabels vertices by a permutation `perm[v] = new id`.
    pub fn permuted(&self, perm: &[VertexId]) -> Result<Graph, GraphError> {
        if perm.len() != self.n {
            return Err(GraphError::DomainMismatch {
                expected: self.n,
                found: perm.len(),
            });
        }
        Graph::new(
            self.n,
            self.edges.iter().map(|&(u, v)| (perm[u as usize], perm[v as usize])),
        )
    }
}

/// A vertex labeling, compared as a partition: label values are opaque.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    labels: Vec<u64>,
}

impl Labeling {
    pub fn new(labels: Vec<u64>) -> Self {
        Labeling { labels }
    }

    pub fn singletons(n: usize) -> Self {
        Labeling {
            labels: (0..n as u64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, v: VertexId) -> u64 {
        self.labels[v as usize]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.labels
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.labels
    }

    pub fn class_count(&self) -> usize {
        let mut seen: Vec<u64> = self.labels.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// Relabels every class by its smallest member.
    pub fn canonical(&self) -> Labeling {
        let mut first: FxHashMap<u64, u64> = FxHashMap::default();
        Labeling {
            labels: self
                .labels
                .iter()
                .enumerate()
                .map(|(v, &l)| *first.entry(l).or_insert(v as u64))
                .collect(),
        }
    }

    /// Table encoding `LABEL(v) -> label`.
    pub fn to_table(&self) -> KvTable {
        self.labels
            .iter()
            .enumerate()
            .map(|(v, &l)| (Key::unit(ns::LABEL, v as u32), l))
            .collect()
    }
}

/// True iff both labelings induce the same equivalence classes.
pub fn partitions_equal(a: &Labeling, b: &Labeling) -> Result<bool, GraphError> {
    if a.len() != b.len() {
        return Err(GraphError::DomainMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let mut forward: FxHashMap<u64, u64> = FxHashMap::default();
    let mut backward: FxHashMap<u64, u64> = FxHashMap::default();
    for (&x, &y) in a.labels.iter().zip(&b.labels) {
        if *forward.entry(x).or_insert(y) != y || *backward.entry(y).or_insert(x) != x {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A total map from the vertices `0..len` of a source graph to the vertices
/// `0..target_len` of a derived graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mapping {
    rep: Vec<VertexId>,
    target_len: usize,
}

impl Mapping {
    pub fn new(rep: Vec<VertexId>, target_len: usize) -> Result<Mapping, GraphError> {
        if let Some(&bad) = rep.iter().find(|&&r| r as usize >= target_len) {
            return Err(GraphError::VertexOutOfRange {
                vertex: bad as u64,
                n: target_len,
            });
        }
        Ok(Mapping { rep, target_len })
    }

    /// Maps every vertex to the index of its class, classes numbered in
    /// order of their smallest member.
    pub fn from_labeling(labels: &Labeling) -> Mapping {
        let mut index: FxHashMap<u64, VertexId> = FxHashMap::default();
        let rep = labels
            .labels
            .iter()
            .map(|&l| {
                let next = index.len() as VertexId;
                *index.entry(l).or_insert(next)
            })
            .collect();
        Mapping {
            rep,
            target_len: index.len(),
        }
    }

    pub fn identity(n: usize) -> Mapping {
        Mapping {
            rep: (0..n as VertexId).collect(),
            target_len: n,
        }
    }

    pub fn len(&self) -> usize {
        self.rep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rep.is_empty()
    }

    pub fn target_len(&self) -> usize {
        self.target_len
    }

    pub fn get(&self, v: VertexId) -> VertexId {
        self.rep[v as usize]
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.rep
    }

    /// `self` followed by `next`: `v -> next(self(v))`.
    pub fn then(&self, next: &Mapping) -> Result<Mapping, GraphError> {
        if self.target_len != next.len() {
            return Err(GraphError::DomainMismatch {
                expected: self.target_len,
                found: next.len(),
            });
        }
        Ok(Mapping {
            rep: self.rep.iter().map(|&r| next.rep[r as usize]).collect(),
            target_len: next.target_len,
        })
    }

    /// Table encoding `MAP(v) -> target`.
    pub fn to_table(&self) -> KvTable {
        self.rep
            .iter()
            .enumerate()
            .map(|(v, &r)| (Key::unit(ns::MAP, v as u32), r as u64))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dense_classes_from_labels() {
        let l = Labeling::new(vec![9, 4, 9, 7, 4]);
        let m = Mapping::from_labeling(&l);
        assert_eq!(m.as_slice(), &[0, 1, 0, 2, 1]);
        assert_eq!(m.target_len(), 3);
        assert_eq!(l.canonical().as_slice(), &[0, 1, 0, 3, 1]);
    }

    #[test]
    fn strict_construction_rejects_bad_edges() {
        assert_eq!(Graph::new(3, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(Graph::new(3, [(0, 1), (1, 0)]), Err(GraphError::DuplicateEdge(0, 1)));
        assert!(matches!(
            Graph::new(2, [(0, 2)]),
            Err(GraphError::VertexOutOfRange { vertex: 2, n: 2 })
        ));
    }

    #[test]
    fn simplified_merges_and_drops_loops() {
        let g = Graph::simplified(3, [(0, 1), (1, 0), (2, 2), (1, 2)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.neighbors(1), &[0, 2]);
        g.check_invariants().unwrap();
    }

    #[test]
    fn table_encoding_has_degree_and_slots() {
        let g = Graph::new(3, [(0, 2), (0, 1)]).unwrap();
        let t = g.to_table();
        assert_eq!(t.get(&Key::unit(ns::DEG, 0)), Some(2));
        assert_eq!(t.get(&Key::new(ns::ADJ, 0, 0)), Some(1));
        assert_eq!(t.get(&Key::new(ns::ADJ, 0, 1)), Some(2));
        assert_eq!(t.get(&Key::unit(ns::DEG, 1)), Some(1));
        assert_eq!(t.len(), 3 + 4);
    }

    #[test]
    fn partition_equality() {
        let a = Labeling::new(vec![1, 1, 2, 3]);
        assert!(partitions_equal(&a, &a).unwrap());
        let relabeled = Labeling::new(vec![9, 9, 4, 7]);
        assert!(partitions_equal(&a, &relabeled).unwrap());
        let merged = Labeling::new(vec![1, 1, 2, 2]);
        assert!(!partitions_equal(&a, &merged).unwrap());
        assert!(!partitions_equal(&merged, &a).unwrap());
        assert!(matches!(
            partitions_equal(&a, &Labeling::new(vec![1])),
            Err(GraphError::DomainMismatch { .. })
        ));
    }

    #[test]
    fn mapping_composition() {
        let m1 = Mapping::new(vec![0, 0, 1], 2).unwrap();
        let m2 = Mapping::new(vec![1, 0], 2).unwrap();
        assert_eq!(m1.then(&m2).unwrap().as_slice(), &[1, 1, 0]);
        assert!(m2.then(&m1).is_err());
        assert!(Mapping::new(vec![3], 2).is_err());
    }

    proptest! {
        #[test]
        fn bijective_relabeling_preserves_partition(
            labels in proptest::collection::vec(0u64..6, 0..40),
            shift in 1u64..1000,
        ) {
            let a = Labeling::new(labels.clone());
            let b = Labeling::new(labels.iter().map(|l| l * 7919 + shift).collect());
            prop_assert!(partitions_equal(&a, &b).unwrap());
        }

        #[test]
        fn simplified_graphs_satisfy_invariants(
            raw in proptest::collection::vec((0u32..20, 0u32..20), 0..80)
        ) {
            let g = Graph::simplified(20, raw).unwrap();
            g.check_invariants().unwrap();
            let degree_sum: usize = g.vertices().map(|v| g.degree(v)).sum();
            prop_assert_eq!(degree_sum, 2 * g.m());
        }
    }
}
