use rand::Rng;

use crate::graph::{Graph, VertexId};
use crate::ns;
use crate::runtime::Key;
use crate::runtime::Simulator;
use crate::util::{derive_seed, item_rng, unpack};

use super::{edge_table, GeneralError};

const STREAM_SAMPLE: u64 = 0x5341_4d50;

/// Keep probability `min(1, sqrt(n/m))`; 1 for edgeless graphs.
pub fn sampling_probability(n: usize, m: usize) -> f64 {
    if m == 0 {
        return 1.0;
    }
    (n as f64 / m as f64).sqrt().min(1.0)
}

/// Keeps every edge independently with probability
/// [`sampling_probability`]. The vertex set is unchanged. One round over
/// edge items; skipped when every edge is kept anyway.
pub fn sample_edges(sim: &mut Simulator, g: &Graph, seed: u64) -> Result<Graph, GeneralError> {
    let p = sampling_probability(g.n(), g.m());
    if p >= 1.0 {
        return Ok(g.clone());
    }
    let coin_seed = derive_seed(seed, STREAM_SAMPLE, 0);
    let tasks = sim.tasks(0..g.m() as u32);
    let out = sim.round(&edge_table(g), &tasks, |m, task| {
        for &e in &task.work_items {
            let packed = m.read_present(Key::unit(ns::EDGE, e))?;
            if item_rng(coin_seed, e).gen_bool(p) {
                m.write(Key::unit(ns::EDGE, e), packed)?;
            }
        }
        Ok(())
    })?;
    let kept: Vec<(VertexId, VertexId)> = out.namespace(ns::EDGE).map(|(_, w)| unpack(w)).collect();
    Ok(Graph::new(g.n(), kept)?)
}
