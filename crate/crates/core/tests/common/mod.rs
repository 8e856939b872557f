#![allow(dead_code)]

use ampc_core::graph::{Graph, VertexId};
use proptest::prelude::*;

/// Forests with up to `max_n` vertices: vertex `i` optionally hangs below a
/// smaller vertex, and the ids are then shuffled.
pub fn forest(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n)
        .prop_flat_map(|n| {
            let parents: Vec<_> = (0..n)
                .map(|i| {
                    if i == 0 {
                        Just(None).boxed()
                    } else {
                        proptest::option::of(0..i as u32).boxed()
                    }
                })
                .collect();
            (parents, Just((0..n as u32).collect::<Vec<_>>()).prop_shuffle())
        })
        .prop_map(|(parents, perm)| {
            let edges: Vec<(VertexId, VertexId)> = parents
                .iter()
                .enumerate()
                .filter_map(|(i, p)| p.map(|p| (perm[i], perm[p as usize])))
                .collect();
            Graph::new(parents.len(), edges).expect("a forest is simple")
        })
}

/// Simple graphs with up to `max_n` vertices and about `density * n` edges.
pub fn graph(max_n: usize, density: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n)
        .prop_flat_map(move |n| {
            let max_m = if n < 2 { 0 } else { density * n };
            (
                Just(n),
                proptest::collection::vec((0..n as u32, 0..n as u32), 0..=max_m),
            )
        })
        .prop_map(|(n, edges)| Graph::simplified(n, edges).expect("endpoints in range"))
}
