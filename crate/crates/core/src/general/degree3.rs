use crate::graph::{Graph, Mapping, VertexId};
use crate::ns;
use crate::runtime::Key;
use crate::runtime::Simulator;
use crate::util::{pack, unpack};

use super::GeneralError;

/// A graph of maximum degree 3 and its relation to the source graph.
#[derive(Clone, Debug)]
pub struct Degree3 {
    pub graph: Graph,
    /// Source vertex of every new vertex.
    pub origin: Vec<VertexId>,
    /// Every source vertex to its first copy.
    pub mapping: Mapping,
}

/// Replaces each vertex of degree `d > 3` by a cycle of `d` copies, copy `i`
/// taking over the edge to the `i`-th neighbor. Vertices of degree at most
/// 3 keep a single copy.
///
/// One round over new vertices. An edge `{u, v}` with `v > u` is emitted by
/// `v`'s side, which locates `u`'s matching copy by binary search.
pub fn to_degree3(sim: &mut Simulator, g: &Graph) -> Result<Degree3, GeneralError> {
    let copies = |v: VertexId| if g.degree(v) > 3 { g.degree(v) } else { 1 };
    let mut base = Vec::with_capacity(g.n());
    let mut origin = Vec::new();
    let mut input = g.to_table();
    for v in g.vertices() {
        let b = origin.len() as u32;
        base.push(b);
        input.insert(Key::unit(ns::OFFSET, v), b as u64);
        for i in 0..copies(v) {
            input.insert(Key::unit(ns::VERTEX, b + i as u32), pack(v, i as u32));
            origin.push(v);
        }
    }
    let total = origin.len() as u32;

    let tasks = sim.tasks(0..total);
    let out = sim.round(&input, &tasks, |m, task| {
        for &s in &task.work_items {
            let (v, i) = unpack(m.read_present(Key::unit(ns::VERTEX, s))?);
            let d = m.read_present(Key::unit(ns::DEG, v))? as u32;
            let slots = if d > 3 {
                let first = s - i;
                let next = first + (i + 1) % d;
                m.write(Key::new(ns::CEDGE, s.min(next), s.max(next)), 1)?;
                i..i + 1
            } else {
                0..d
            };
            for slot in slots {
                let u = m.read_present(Key::new(ns::ADJ, v, slot))? as VertexId;
                if u > v {
                    continue;
                }
                let du = m.read_present(Key::unit(ns::DEG, u))? as u32;
                let mut cu = m.read_present(Key::unit(ns::OFFSET, u))? as u32;
                if du > 3 {
                    let (mut lo, mut hi) = (0u32, du);
                    while lo < hi {
                        let mid = lo + (hi - lo) / 2;
                        if (m.read_present(Key::new(ns::ADJ, u, mid))? as VertexId) < v {
                            lo = mid + 1;
                        } else {
                            hi = mid;
                        }
                    }
                    cu += lo;
                }
                m.write(Key::new(ns::CEDGE, s.min(cu), s.max(cu)), 1)?;
            }
        }
        Ok(())
    })?;
    let graph = Graph::new(total as usize, out.namespace(ns::CEDGE).map(|(k, _)| (k.a, k.b)))?;
    Ok(Degree3 {
        graph,
        origin,
        mapping: Mapping::new(base, total as usize)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_graph, oracle_labeling, partitions_equal, GraphFamily, Labeling};
    use crate::runtime::ModelConfig;

    fn sim() -> Simulator {
        Simulator::new(ModelConfig::new(8, 1 << 20, 1 << 20, true).unwrap())
    }

    fn pulled_back(d: &Degree3) -> Labeling {
        let l = oracle_labeling(&d.graph);
        Labeling::new((0..d.mapping.len() as u32).map(|v| l.get(d.mapping.get(v))).collect())
    }

    #[test]
    fn low_degree_graphs_are_unchanged() {
        for g in [
            Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap(),
            Graph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap(),
        ] {
            let d = to_degree3(&mut sim(), &g).unwrap();
            assert_eq!(d.graph, g);
            assert_eq!(d.mapping, Mapping::identity(g.n()));
        }
    }

    #[test]
    fn star_center_becomes_a_cycle() {
        let g = gen_graph(&GraphFamily::Star { n: 5 }, 0).unwrap();
        let d = to_degree3(&mut sim(), &g).unwrap();
        assert_eq!(d.graph.n(), 8);
        assert_eq!(d.graph.m(), 8);
        assert_eq!(d.graph.max_degree(), 3);
        assert_eq!(oracle_labeling(&d.graph).class_count(), 1);
        assert_eq!(&d.origin[..4], &[0, 0, 0, 0]);
    }

    #[test]
    fn components_correspond() {
        for seed in 0..5 {
            let g = gen_graph(&GraphFamily::Gnm { n: 300, m: 900 }, seed).unwrap();
            let d = to_degree3(&mut sim(), &g).unwrap();
            d.graph.check_invariants().unwrap();
            assert!(d.graph.max_degree() <= 3);
            let low = g.vertices().filter(|&v| g.degree(v) <= 3).count();
            assert!(d.graph.n() <= 2 * g.m() + low);
            assert!(partitions_equal(&pulled_back(&d), &oracle_labeling(&g)).unwrap());
            // every copy lies in its origin's component
            let l = oracle_labeling(&d.graph);
            for (c, &v) in d.origin.iter().enumerate() {
                assert_eq!(l.get(c as u32), l.get(d.mapping.get(v)));
            }
        }
    }
}
