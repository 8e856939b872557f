use std::hint::black_box;

use ampc_core::forest::{connected_components_forest, ForestRunConfig};
use ampc_core::general::{connected_components, GeneralRunConfig};
use ampc_core::graph::{gen_graph, GraphFamily};
use ampc_core::runtime::{ExecutionMode, Key, KvTable, ModelConfig, Simulator};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, ExecutionMode); 2] = [
    ("parallel", ExecutionMode::Parallel),
    ("sequential", ExecutionMode::Sequential),
];

/// A pointer-jumping style round: every item reads a successor chain.
fn single_round(c: &mut Criterion) {
    let n = 200_000u32;
    let input: KvTable = (0..n)
        .map(|v| (Key::unit(1, v), ((v as u64) * 7 + 1) % n as u64))
        .collect();
    let mut group = c.benchmark_group("round");
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::new("chase8", name), |b| {
            b.iter(|| {
                let mut sim = Simulator::new(ModelConfig::new(512, 1 << 20, 1 << 30, true).unwrap()).with_mode(mode);
                let tasks = sim.tasks(0..n);
                sim.round(&input, &tasks, |m, task| {
                    for &v in &task.work_items {
                        let mut at = v;
                        for _ in 0..8 {
                            at = m.read_present(Key::unit(1, at))? as u32;
                        }
                        m.write(Key::unit(2, v), at as u64)?;
                    }
                    Ok(())
                })
                .unwrap()
            })
        });
    }
    group.finish();
}

fn algorithms(c: &mut Criterion) {
    let forest = gen_graph(&GraphFamily::RandomForest { trees: 100, n: 20_000 }, 0).unwrap();
    let gnm = gen_graph(&GraphFamily::Gnm { n: 5_000, m: 10_000 }, 0).unwrap();
    let mut group = c.benchmark_group("algorithms");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::new("forest_20k", name), |b| {
            let cfg = ForestRunConfig {
                mode,
                ..ForestRunConfig::default()
            };
            b.iter(|| connected_components_forest(black_box(&forest), &cfg, 1).unwrap())
        });
        group.bench_function(BenchmarkId::new("general_5k", name), |b| {
            let cfg = GeneralRunConfig {
                mode,
                ..GeneralRunConfig::default()
            };
            b.iter(|| connected_components(black_box(&gnm), &cfg, 1).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, single_round, algorithms);
criterion_main!(benches);
