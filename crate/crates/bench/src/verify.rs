//! Statistical and exact checks of the algorithms' stated bounds.

use std::collections::BTreeMap;

use ampc_core::forest::{
    connected_components_forest, rank_probability, sample_rank, shrink_small_cycles, step2_contract, CycleSet,
    ForestError, ForestRunConfig,
};
use ampc_core::general::{connected_components, shrink_general, GeneralError, GeneralRunConfig};
use ampc_core::graph::{gen_graph, oracle_labeling, partitions_equal, GraphFamily, VertexId};
use ampc_core::runtime::{ModelConfig, RuntimeError, Simulator};
use ampc_core::util::{derive_seed, item_rng, log_star};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Algorithm, Profile};
use crate::constants;
use crate::experiment::{run_once, RunError};
use crate::stats::{harmonic, mean_se};

/// One verified bound. `pass` holds iff `observed <= threshold`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check_name: String,
    pub bound_expression: String,
    pub observed: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, bound: impl Into<String>, observed: f64, threshold: f64) -> Self {
        CheckRecord {
            check_name: name.into(),
            bound_expression: bound.into(),
            observed,
            threshold,
            pass: observed <= threshold,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub constants_version: &'static str,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// A simulator large enough that no quota is ever hit.
fn roomy_sim(items: usize) -> Simulator {
    let config = ModelConfig::new(64, 1 << 40, (items as u64).max(1), false).expect("valid config");
    Simulator::new(config)
}

/// `count` cycles of length `len` over a random permutation of the ids.
pub fn shuffled_cycles(count: usize, len: usize, seed: u64) -> CycleSet {
    let mut ids: Vec<VertexId> = (0..(count * len) as VertexId).collect();
    ids.sort_by_key(|&v| derive_seed(seed, 0x5348_5546, v as u64));
    let cycles: Vec<Vec<VertexId>> = ids.chunks(len).map(<[VertexId]>::to_vec).collect();
    CycleSet::from_cycles(&cycles).expect("ids form a permutation")
}

/// Zero oracle mismatches or run errors over every case and seed.
pub fn check_oracle(cases: &[(Algorithm, GraphFamily)], seeds: &[u64], delta: f64) -> Vec<CheckRecord> {
    cases
        .iter()
        .map(|&(algorithm, family)| {
            let failures = seeds
                .par_iter()
                .filter(|&&seed| {
                    let g = gen_graph(&family, seed).expect("valid family");
                    !matches!(run_once(algorithm, &g, delta, None, true, seed), Ok(r) if r.oracle_match)
                })
                .count();
            CheckRecord::new(
                format!("oracle {algorithm} {family}"),
                "mismatching or failed seeds == 0",
                failures as f64,
                0.0,
            )
        })
        .collect()
}

/// Step 2 alone removes at least `min(8B, k)` vertices of every cycle of
/// length `k`, and no vertex is absorbed twice.
pub fn check_step2_removal(bs: &[u64], lens: std::ops::RangeInclusive<usize>, per_len: usize) -> Vec<CheckRecord> {
    bs.iter()
        .map(|&b| {
            let mut violations = 0usize;
            for len in lens.clone() {
                let cs = shuffled_cycles(per_len, len, len as u64 * 131 + b);
                let out = step2_contract(&mut roomy_sim(cs.len()), &cs, b).expect("step 2 runs");
                let need = (8 * b as usize).min(len);
                violations += out.per_cycle.iter().filter(|c| c.removed < need).count();
                violations += usize::from(out.absorb_writes != out.absorbed);
            }
            CheckRecord::new(
                format!("step2 removal B={b} k={}..={}", lens.start(), lens.end()),
                "cycles losing fewer than min(8B, k) vertices, plus overlapping absorptions, == 0",
                violations as f64,
                0.0,
            )
        })
        .collect()
}

/// Survivors per cycle after one iteration, and the surviving fraction of
/// all vertices against `6 / 2^B`.
pub fn check_vertex_drop(k: usize, b: u64, cycles: usize, seeds: &[u64]) -> Vec<CheckRecord> {
    let per_seed: Vec<(Vec<f64>, f64)> = seeds
        .par_iter()
        .map(|&seed| {
            let cs = shuffled_cycles(cycles, k, seed);
            let out = shrink_small_cycles(&mut roomy_sim(cs.len()), &cs, b, seed).expect("iteration runs");
            let survivors = cs
                .cycles()
                .iter()
                .map(|cycle| {
                    let mut images: Vec<VertexId> = cycle
                        .iter()
                        .map(|&v| out.mapping.get(v))
                        .filter(|&w| out.cycles.is_alive(w))
                        .collect();
                    images.sort_unstable();
                    images.dedup();
                    images.len() as f64
                })
                .collect();
            (survivors, out.metrics.alive_after as f64 / cs.len() as f64)
        })
        .collect();
    let samples: Vec<f64> = per_seed.iter().flat_map(|s| s.0.iter().copied()).collect();
    let fractions: Vec<f64> = per_seed.iter().map(|s| s.1).collect();
    let (mean, se) = mean_se(&samples);
    let (frac, frac_se) = mean_se(&fractions);
    let two_b = 2f64.powi(b as i32);
    let bound = 2.0 * k as f64 / two_b + 1.0 / two_b;
    vec![
        CheckRecord::new(
            format!("vertex drop k={k} B={b}"),
            format!("mean survivors <= 2k/2^B + 1/2^B + 3 SE = {bound:.4} + 3 SE"),
            mean,
            bound + 3.0 * se,
        ),
        CheckRecord::new(
            format!("surviving fraction k={k} B={b}"),
            format!("mean alive_after / n' <= 6/2^B + 3 SE = {:.5} + 3 SE", 6.0 / two_b),
            frac,
            6.0 / two_b + 3.0 * frac_se,
        ),
    ]
}

/// Per-vertex Step-1 queries; errors come from per-cycle means.
pub fn check_step1_queries(b: u64, k: usize, cycles: usize, seeds: &[u64]) -> CheckRecord {
    let per_seed: Vec<Vec<f64>> = seeds
        .par_iter()
        .map(|&seed| {
            let mut per_cycle = Vec::new();
            let cs = shuffled_cycles(cycles, k, seed ^ 0x5155);
            let out = shrink_small_cycles(&mut roomy_sim(cs.len()), &cs, b, seed).expect("iteration runs");
            // step1_queries follows ascending vertex order
            let alive: Vec<VertexId> = cs.alive().collect();
            let mut by_vertex = vec![0u32; cs.len()];
            for (&v, &q) in alive.iter().zip(&out.metrics.step1_queries) {
                by_vertex[v as usize] = q;
            }
            for cycle in cs.cycles() {
                let total: u64 = cycle.iter().map(|&v| by_vertex[v as usize] as u64).sum();
                per_cycle.push(total as f64 / cycle.len() as f64);
            }
            per_cycle
        })
        .collect();
    let (mean, se) = mean_se(&per_seed.concat());
    CheckRecord::new(
        format!("step1 queries B={b} k={k}"),
        format!("mean queries per vertex <= 4B + 3 SE = {} + 3 SE", 4 * b),
        mean,
        4.0 * b as f64 + 3.0 * se,
    )
}

/// Ranked-loop iterations of each seed's forest run on
/// random_forest(100, n).
pub fn iteration_counts(n: usize, seeds: &[u64]) -> Vec<SeedOutcome> {
    let family = GraphFamily::RandomForest { trees: 100, n };
    let cfg = ForestRunConfig::default();
    seeds
        .par_iter()
        .map(|&seed| {
            let g = gen_graph(&family, seed).expect("valid family");
            match connected_components_forest(&g, &cfg, seed) {
                Ok((_, report)) => SeedOutcome::Measured(report.iterations.len() as f64),
                Err(_) => SeedOutcome::Failed,
            }
        })
        .collect()
}

/// Iterations of the ranked loop of the forest algorithm.
pub fn check_iterations(n: usize, seeds: &[u64], c0: f64) -> CheckRecord {
    let outcomes = iteration_counts(n, seeds);
    let worst = if unmeasured(&outcomes) > 0 {
        f64::MAX
    } else {
        measured(&outcomes).into_iter().fold(0.0, f64::max)
    };
    let bound = 2.0 * log_star(n as f64) as f64 + c0;
    CheckRecord::new(
        format!("iterations random_forest(100,{n})"),
        format!("max iterations <= 2 log* n + c0 = {bound}"),
        worst,
        bound,
    )
}

fn shrink_sim() -> Simulator {
    Simulator::new(ModelConfig::new(4096, constants::SHRINK_CHECK_SPACE, 1 << 40, true).expect("valid config"))
}

/// Per-seed root fraction and mean explored count of one shrinking step.
fn shrink_samples(family: &GraphFamily, t: u64, seeds: &[u64]) -> Vec<(f64, f64)> {
    seeds
        .par_iter()
        .map(|&seed| {
            let g = gen_graph(family, seed).expect("valid family");
            let out = shrink_general(&mut shrink_sim(), &g, t, 1.0, derive_seed(seed, t, 0)).expect("shrink runs");
            let s = &out.stats;
            let explored = s.explored.iter().map(|&c| c as f64).sum::<f64>() / s.g3_vertices as f64;
            (s.roots as f64 / s.g3_vertices as f64, explored)
        })
        .collect()
}

/// Root fraction `<= c2 / t` at each budget and strictly smaller at the
/// largest budget than at the smallest.
pub fn check_root_rate(family: &GraphFamily, ts: &[u64], seeds: &[u64], c2: f64) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let mut fractions = Vec::new();
    for &t in ts {
        let samples: Vec<f64> = shrink_samples(family, t, seeds).into_iter().map(|s| s.0).collect();
        let (mean, _) = mean_se(&samples);
        fractions.push(mean);
        records.push(CheckRecord::new(
            format!("root fraction {family} t={t}"),
            format!("mean root fraction <= c2/t = {:.5}", c2 / t as f64),
            mean,
            c2 / t as f64,
        ));
    }
    if let (Some(first), Some(last)) = (fractions.first(), fractions.last()) {
        records.push(CheckRecord::new(
            format!("root fraction decreases t={}..{}", ts[0], ts[ts.len() - 1]),
            "1 if fraction(largest t) >= fraction(smallest t), else 0; must be 0",
            f64::from(u8::from(last >= first)),
            0.0,
        ));
    }
    records
}

/// Mean explored vertices per search start.
pub fn check_bfs_explored(family: &GraphFamily, t: u64, seeds: &[u64]) -> CheckRecord {
    let samples: Vec<f64> = shrink_samples(family, t, seeds).into_iter().map(|s| s.1).collect();
    let (mean, se) = mean_se(&samples);
    let bound = 2.0 * (1.0 + harmonic(t - 1));
    CheckRecord::new(
        format!("bfs explored {family} t={t}"),
        format!("mean explored <= 2(1 + H_(t-1)) + 3 SE = {bound:.4} + 3 SE"),
        mean,
        bound + 3.0 * se,
    )
}

/// Outcome of one seed of a run-level measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SeedOutcome {
    Measured(f64),
    /// The run stopped on an exceeded quota or recursion budget.
    Budget,
    Failed,
}

/// Largest per-round `peak_live_words / (n + m)` of each seed's forest run.
pub fn space_ratios(family: &GraphFamily, delta: f64, seeds: &[u64]) -> Vec<SeedOutcome> {
    let cfg = ForestRunConfig::with_delta(delta);
    seeds
        .par_iter()
        .map(|&seed| {
            let g = gen_graph(family, seed).expect("valid family");
            match connected_components_forest(&g, &cfg, seed) {
                Ok((_, report)) => {
                    let size = (g.n() + g.m()) as f64;
                    let worst = report
                        .round_metrics
                        .iter()
                        .map(|h| h.peak_live_words)
                        .max()
                        .unwrap_or(0);
                    SeedOutcome::Measured(worst as f64 / size)
                }
                Err(ForestError::Runtime(RuntimeError::QuotaExceeded { .. })) => SeedOutcome::Budget,
                Err(_) => SeedOutcome::Failed,
            }
        })
        .collect()
}

/// Recursion calls of each seed's general run; wrong labelings count as
/// failures.
pub fn recursion_sizes(family: &GraphFamily, seeds: &[u64]) -> Vec<SeedOutcome> {
    let cfg = GeneralRunConfig::default();
    seeds
        .par_iter()
        .map(|&seed| {
            let g = gen_graph(family, seed).expect("valid family");
            match connected_components(&g, &cfg, seed) {
                Ok((l, report)) if partitions_equal(&l, &oracle_labeling(&g)).unwrap_or(false) => {
                    SeedOutcome::Measured(report.nodes.len() as f64)
                }
                Ok(_) => SeedOutcome::Failed,
                Err(GeneralError::RecursionBudgetExceeded { .. }) => SeedOutcome::Budget,
                Err(_) => SeedOutcome::Failed,
            }
        })
        .collect()
}

fn measured(outcomes: &[SeedOutcome]) -> Vec<f64> {
    outcomes
        .iter()
        .filter_map(|o| match o {
            SeedOutcome::Measured(x) => Some(*x),
            _ => None,
        })
        .collect()
}

fn unmeasured(outcomes: &[SeedOutcome]) -> usize {
    outcomes
        .iter()
        .filter(|o| !matches!(o, SeedOutcome::Measured(_)))
        .count()
}

/// Peak live words per round relative to `n + m`, with quotas enforced.
pub fn check_space(family: &GraphFamily, delta: f64, seeds: &[u64], c6: f64) -> Vec<CheckRecord> {
    let outcomes = space_ratios(family, delta, seeds);
    let worst = measured(&outcomes).into_iter().fold(0.0, f64::max);
    vec![
        CheckRecord::new(
            format!("peak space {family} delta={delta}"),
            format!("max over rounds of peak_live_words / (n + m) <= c6 = {c6}"),
            worst,
            c6,
        ),
        CheckRecord::new(
            format!("quota events {family} delta={delta}"),
            "QuotaExceeded events plus other failures == 0",
            unmeasured(&outcomes) as f64,
            0.0,
        ),
    ]
}

/// Mean recursion size at `k = log* n`, and no exhausted budgets.
pub fn check_recursion(family: &GraphFamily, seeds: &[u64], threshold: f64) -> Vec<CheckRecord> {
    let outcomes = recursion_sizes(family, seeds);
    let sizes = measured(&outcomes);
    let mean = if sizes.is_empty() { f64::MAX } else { mean_se(&sizes).0 };
    vec![
        CheckRecord::new(
            format!("recursion size {family}"),
            format!("mean recursion calls <= {threshold}"),
            mean,
            threshold,
        ),
        CheckRecord::new(
            format!("recursion budget {family}"),
            "RecursionBudgetExceeded events plus failures == 0",
            unmeasured(&outcomes) as f64,
            0.0,
        ),
    ]
}

/// `sum_i C_B / 2^i` over `i = 1..=B` in exact rationals.
pub fn pi_total(b: u32) -> BigRational {
    let two_b = BigInt::one() << b;
    let c = BigRational::new(two_b.clone(), two_b - 1);
    (1..=b)
        .map(|i| c.clone() / BigRational::from_integer(BigInt::one() << i))
        .fold(BigRational::zero(), |acc, p| acc + p)
}

pub fn check_pi_exact(max_b: u32) -> CheckRecord {
    let wrong = (1..=max_b).filter(|&b| !pi_total(b).is_one()).count();
    CheckRecord::new(
        format!("rank distribution sums to 1, B=1..{max_b}"),
        "budgets whose exact total differs from 1 == 0",
        wrong as f64,
        0.0,
    )
}

/// Largest deviation of an empirical rank frequency from its probability,
/// in standard errors.
pub fn check_pi_empirical(b: u64, draws: usize, seed: u64) -> CheckRecord {
    let mut rng = item_rng(seed, 0);
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for _ in 0..draws {
        *counts.entry(sample_rank(b, &mut rng)).or_default() += 1;
    }
    let mut worst = if counts.keys().any(|&r| r == 0 || r > b) {
        f64::MAX
    } else {
        0.0f64
    };
    for i in 1..=b {
        let p = rank_probability(b, i);
        let freq = *counts.get(&i).unwrap_or(&0) as f64 / draws as f64;
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        worst = worst.max((freq - p).abs() / se);
    }
    CheckRecord::new(
        format!("rank frequencies B={b} draws={draws}"),
        "max |freq - p| / SE <= 4",
        worst,
        4.0,
    )
}

/// Trial sizes of one suite run.
#[derive(Clone, Copy, Debug)]
pub struct SuiteSizes {
    pub seeds: u64,
    pub drop_cycles: usize,
    pub query_cycles: usize,
    pub iteration_sizes: &'static [usize],
    pub big_seeds: u64,
    pub shrink_seeds: u64,
    pub recursion: GraphFamily,
    pub forest_n: usize,
    pub draws: usize,
}

impl SuiteSizes {
    pub fn for_profile(profile: Profile) -> Self {
        match profile {
            Profile::Full => SuiteSizes {
                seeds: 20,
                drop_cycles: 200,
                query_cycles: 8,
                iteration_sizes: &[10_000, 100_000, 1_000_000],
                big_seeds: 3,
                shrink_seeds: 50,
                recursion: GraphFamily::Gnm { n: 100_000, m: 200_000 },
                forest_n: 100_000,
                draws: 1_000_000,
            },
            Profile::Quick => SuiteSizes {
                seeds: 4,
                drop_cycles: 40,
                query_cycles: 4,
                iteration_sizes: &[10_000],
                big_seeds: 1,
                shrink_seeds: 10,
                recursion: GraphFamily::Gnm { n: 10_000, m: 20_000 },
                forest_n: 10_000,
                draws: 100_000,
            },
        }
    }
}

/// A group of checks that passes only when all of them do.
#[derive(Clone, Debug, Serialize)]
pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    pub checks: Vec<CheckRecord>,
}

impl Criterion {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Runs the checks of every criterion. `only` restricts the run to the
/// listed criterion ids.
pub fn run_criteria(profile: Profile, delta: f64, only: Option<&[usize]>) -> Vec<Criterion> {
    let z = SuiteSizes::for_profile(profile);
    let seeds: Vec<u64> = (0..z.seeds).collect();
    let big: Vec<u64> = (0..z.big_seeds).collect();
    let shrink_seeds: Vec<u64> = (0..z.shrink_seeds).collect();
    let gnm_small = GraphFamily::Gnm { n: 2000, m: 4000 };
    let forest = GraphFamily::RandomForest {
        trees: 100,
        n: z.forest_n,
    };

    let titles = [
        "oracle correctness",
        "step-2 removal",
        "vertex drop",
        "step-1 queries",
        "iteration count",
        "root rate",
        "search space",
        "space accounting",
        "recursion size",
        "rank distribution",
    ];
    let mut out = Vec::new();
    for (i, title) in titles.into_iter().enumerate() {
        let id = i + 1;
        if only.is_some_and(|ids| !ids.contains(&id)) {
            continue;
        }
        let checks = match id {
            1 => check_oracle(&oracle_cases(z.forest_n), &seeds, delta),
            2 => check_step2_removal(&[1, 4, 16], 2..=200, 3),
            3 => [2, 4, 8]
                .into_iter()
                .flat_map(|b| check_vertex_drop(1000, b, z.drop_cycles, &seeds))
                .collect(),
            4 => [2, 8]
                .into_iter()
                .map(|b| check_step1_queries(b, 4096, z.query_cycles, &seeds))
                .collect(),
            5 => z
                .iteration_sizes
                .iter()
                .map(|&n| check_iterations(n, if n > 100_000 { &big } else { &seeds }, constants::C0))
                .collect(),
            6 => check_root_rate(&gnm_small, &[4, 16, 64], &shrink_seeds, constants::C2),
            7 => [8, 64]
                .into_iter()
                .map(|t| check_bfs_explored(&gnm_small, t, &shrink_seeds))
                .collect(),
            8 => check_space(&forest, delta, &big, constants::C6),
            9 => check_recursion(&z.recursion, &seeds, constants::RECURSION_NODES),
            _ => vec![check_pi_exact(64), check_pi_empirical(5, z.draws, 5)],
        };
        out.push(Criterion { id, title, checks });
    }
    out
}

/// Every check of the suite, in criterion order.
pub fn verify_lemma_suite(profile: Profile, delta: f64) -> VerificationReport {
    VerificationReport {
        constants_version: constants::VERSION,
        checks: run_criteria(profile, delta, None)
            .into_iter()
            .flat_map(|c| c.checks)
            .collect(),
    }
}

/// Families of the correctness check; forests run the forest algorithm.
pub fn oracle_cases(forest_n: usize) -> Vec<(Algorithm, GraphFamily)> {
    vec![
        (Algorithm::Forest, GraphFamily::Path { n: 10_000 }),
        (Algorithm::Forest, GraphFamily::Star { n: 10_000 }),
        (Algorithm::Forest, GraphFamily::BalancedBinaryTree { n: 10_000 }),
        (
            Algorithm::Forest,
            GraphFamily::RandomForest {
                trees: 100,
                n: forest_n,
            },
        ),
        (Algorithm::General, GraphFamily::DisjointCycles { count: 100, len: 100 }),
        (Algorithm::General, GraphFamily::Gnm { n: 10_000, m: 20_000 }),
    ]
}

impl From<RunError> for CheckRecord {
    fn from(e: RunError) -> Self {
        CheckRecord::new(format!("run error: {e}"), "no errors", 1.0, 0.0)
    }
}

/// Raw measurements from which the constants are frozen.
#[derive(Clone, Debug, Serialize)]
pub struct PilotReport {
    /// Largest `iterations - 2 log* n` on random_forest(100, 10^4), at least 0.
    pub c0: f64,
    pub iterations_max: f64,
    /// `t * mean root fraction` per `t`, gnm(2000, 4000).
    pub root_rate: Vec<(u64, f64)>,
    /// Mean explored per start per `t`, gnm(2000, 4000).
    pub explored: Vec<(u64, f64, f64)>,
    /// Largest peak-to-input ratio, random_forest(100, 10^5).
    pub space_ratio_max: f64,
    pub recursion_mean: f64,
    pub recursion_max: f64,
    pub failed_seeds: usize,
}

/// Measures the pilot quantities; frozen values live in [`constants`].
pub fn pilot(seeds: u64, shrink_seeds: u64, space_seeds: u64, recursion: &GraphFamily) -> PilotReport {
    let seeds: Vec<u64> = (0..seeds).collect();
    let shrink_seeds: Vec<u64> = (0..shrink_seeds).collect();
    let space_seeds: Vec<u64> = (0..space_seeds).collect();
    let gnm = GraphFamily::Gnm { n: 2000, m: 4000 };

    let iterations = iteration_counts(10_000, &seeds);
    let iterations_max = measured(&iterations).into_iter().fold(0.0, f64::max);
    let mut root_rate = Vec::new();
    let mut explored = Vec::new();
    for t in [4, 8, 16, 64] {
        let samples = shrink_samples(&gnm, t, &shrink_seeds);
        let roots: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let ex: Vec<f64> = samples.iter().map(|s| s.1).collect();
        root_rate.push((t, t as f64 * mean_se(&roots).0));
        let (m, se) = mean_se(&ex);
        explored.push((t, m, se));
    }
    let space = space_ratios(&GraphFamily::RandomForest { trees: 100, n: 100_000 }, 0.5, &space_seeds);
    let sizes = recursion_sizes(recursion, &seeds);
    let measured_sizes = measured(&sizes);
    PilotReport {
        c0: (iterations_max - 2.0 * log_star(10_000.0) as f64).max(0.0),
        iterations_max,
        root_rate,
        explored,
        space_ratio_max: measured(&space).into_iter().fold(0.0, f64::max),
        recursion_mean: if measured_sizes.is_empty() {
            f64::NAN
        } else {
            mean_se(&measured_sizes).0
        },
        recursion_max: measured_sizes.iter().copied().fold(0.0, f64::max),
        failed_seeds: unmeasured(&iterations) + unmeasured(&space) + unmeasured(&sizes),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_distribution_totals() {
        assert!(pi_total(1).is_one());
        assert!(pi_total(64).is_one());
        assert!(check_pi_exact(64).pass);
    }

    #[test]
    fn shuffled_cycles_have_requested_shape() {
        let cs = shuffled_cycles(5, 7, 1);
        assert_eq!(cs.len(), 35);
        assert!(cs.cycles().iter().all(|c| c.len() == 7));
        assert_ne!(cs.cycles()[0], (0..7).collect::<Vec<u32>>());
    }

    #[test]
    fn step2_example_cycles_lose_thirty_two() {
        let cs = CycleSet::uniform(100, 50);
        let out = step2_contract(&mut roomy_sim(cs.len()), &cs, 4).unwrap();
        assert_eq!(out.per_cycle.len(), 100);
        assert!(out.per_cycle.iter().all(|c| c.removed >= 32));
        assert!(check_step2_removal(&[4], 50..=50, 100)[0].pass);
    }

    #[test]
    fn record_pass_rule() {
        assert!(CheckRecord::new("a", "b", 1.0, 1.0).pass);
        assert!(!CheckRecord::new("a", "b", 1.5, 1.0).pass);
        assert!(!CheckRecord::new("a", "b", f64::NAN, 1.0).pass);
    }
}
