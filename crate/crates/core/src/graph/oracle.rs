use petgraph::unionfind::UnionFind;

use super::{Graph, Labeling};

/// Exact connected-components labeling by sequential union-find. Runs
/// entirely outside the simulated runtime and serves as ground truth.
pub fn oracle_labeling(g: &Graph) -> Labeling {
    let mut uf = UnionFind::<u32>::new(g.n());
    for &(u, v) in g.edges() {
        uf.union(u, v);
    }
    Labeling::new(uf.into_labeling().into_iter().map(u64::from).collect())
}
