use crate::graph::{GraphError, Labeling, Mapping};
use crate::ns;
use crate::runtime::{Key, Simulator};

use super::ForestError;

/// Pulls a labeling of a shrunken graph back through a mapping:
/// `result(v) = labels_h(m(v))`. One round of two reads per vertex.
pub fn compose(sim: &mut Simulator, labels_h: &Labeling, m: &Mapping) -> Result<Labeling, ForestError> {
    if m.target_len() != labels_h.len() {
        return Err(GraphError::DomainMismatch {
            expected: m.target_len(),
            found: labels_h.len(),
        }
        .into());
    }
    if m.is_empty() {
        return Ok(Labeling::new(Vec::new()));
    }
    let mut input = labels_h.to_table();
    input.extend(m.to_table())?;
    let tasks = sim.tasks(0..m.len() as u32);
    let out = sim.round(&input, &tasks, |mach, task| {
        for &v in &task.work_items {
            let target = mach.read_present(Key::unit(ns::MAP, v))? as u32;
            let label = mach.read_present(Key::unit(ns::LABEL, target))?;
            mach.write(Key::unit(ns::LABEL, v), label)?;
        }
        Ok(())
    })?;
    let mut labels = vec![0u64; m.len()];
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
        Simulator::new(ModelConfig::new(4, 1 << 20, 1 << 20, true).unwrap())
    }

    #[test]
    fn identity_leaves_labels_unchanged() {
        let l = Labeling::new(vec![5, 5, 9, 2]);
        let out = compose(&mut sim(), &l, &Mapping::identity(4)).unwrap();
        assert_eq!(out, l);
    }

    #[test]
    fn composition_is_associative() {
        let l = Labeling::new(vec![7, 8]);
        let m2 = Mapping::new(vec![0, 1, 1], 2).unwrap();
        let m1 = Mapping::new(vec![2, 0, 0, 1, 2], 3).unwrap();
        let mut s = sim();
        let step = compose(&mut s, &l, &m2).unwrap();
        let nested = compose(&mut s, &step, &m1).unwrap();
        let direct = compose(&mut s, &l, &m1.then(&m2).unwrap()).unwrap();
        assert!(partitions_equal(&nested, &direct).unwrap());
        assert_eq!(nested.as_slice(), &[8, 7, 7, 8, 8]);
    }

    #[test]
    fn domain_mismatch() {
        let l = Labeling::new(vec![1, 2]);
        let m = Mapping::new(vec![0, 1, 2], 3).unwrap();
        assert!(matches!(
            compose(&mut sim(), &l, &m),
            Err(ForestError::Graph(GraphError::DomainMismatch { .. }))
        ));
    }
}
