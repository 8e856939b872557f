use crate::graph::{Graph, GraphError, Mapping};
use crate::ns;
use crate::runtime::Key;
use crate::runtime::Simulator;
use crate::util::unpack;

use super::{edge_table, GeneralError};

/// Merges the vertices of every class of `classes` into one vertex.
///
/// Self-loops vanish and parallel edges merge because every surviving edge
/// is written under its canonical `(min, max)` key. One round over edge
/// items; the result has `classes.target_len()` vertices.
pub fn contract(sim: &mut Simulator, g: &Graph, classes: &Mapping) -> Result<Graph, GeneralError> {
    if classes.len() != g.n() {
        return Err(GraphError::DomainMismatch {
            expected: g.n(),
            found: classes.len(),
        }
        .into());
    }
    if g.m() == 0 {
        return Ok(Graph::empty(classes.target_len()));
    }
    let mut input = edge_table(g);
    input.extend(classes.to_table())?;
    let tasks = sim.tasks(0..g.m() as u32);
    let out = sim.round(&input, &tasks, |m, task| {
        for &e in &task.work_items {
            let (u, v) = unpack(m.read_present(Key::unit(ns::EDGE, e))?);
            let cu = m.read_present(Key::unit(ns::MAP, u))? as u32;
            let cv = m.read_present(Key::unit(ns::MAP, v))? as u32;
            if cu != cv {
                m.write(Key::new(ns::CEDGE, cu.min(cv), cu.max(cv)), 1)?;
            }
        }
        Ok(())
    })?;
    Ok(Graph::new(
        classes.target_len(),
        out.namespace(ns::CEDGE).map(|(k, _)| (k.a, k.b)),
    )?)
}
