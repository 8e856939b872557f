use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::metrics::RoundMetrics;
use super::table::{Key, KvTable, Word};
use super::RuntimeError;

/// Floor on the derived local space, so that tiny inputs still leave room
/// for the constant per-vertex work of a round.
pub const MIN_LOCAL_SPACE: u64 = 64;

/// Machine-level model parameters: `M` machines with `S` words of local
/// space each, and a total-space accounting target `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub n_machines: usize,
    pub local_space: u64,
    pub total_space: u64,
    pub enforce_quotas: bool,
}

impl ModelConfig {
    pub fn new(
        n_machines: usize,
        local_space: u64,
        total_space: u64,
        enforce_quotas: bool,
    ) -> Result<Self, RuntimeError> {
        if n_machines == 0 {
            return Err(RuntimeError::InvalidConfig("n_machines must be positive".into()));
        }
        if local_space == 0 || total_space == 0 {
            return Err(RuntimeError::InvalidConfig("space budgets must be positive".into()));
        }
        Ok(ModelConfig {
            n_machines,
            local_space,
            total_space,
            enforce_quotas,
        })
    }

    /// Sizing for an input of `n` vertices and `m` edges: `S = ceil(n^delta)`
    /// (never below [`MIN_LOCAL_SPACE`]), `T = n + m`, and enough machines
    /// that the average machine holds `S / slack` words of the input.
    pub fn for_input(n: usize, m: usize, delta: f64, slack: f64, enforce_quotas: bool) -> Result<Self, RuntimeError> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(RuntimeError::InvalidConfig(format!("delta {delta} outside (0,1)")));
        }
        if slack.is_nan() || slack < 1.0 {
            return Err(RuntimeError::InvalidConfig(format!("slack {slack} below 1")));
        }
        let size = (n + m).max(1) as f64;
        let local_space = ((n.max(2) as f64).powf(delta).ceil() as u64).max(MIN_LOCAL_SPACE);
        let n_machines = ((size * slack) / local_space as f64).ceil().max(1.0) as usize;
        ModelConfig::new(n_machines, local_space, (n + m).max(1) as u64, enforce_quotas)
    }
}

/// Finalizer of SplitMix64; a fixed bijective mixer for seed derivation.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The slice of a round's work owned by one machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineTask {
    pub machine_id: usize,
    pub work_items: Vec<u32>,
}

/// Deals `items` to machines round-robin, so no machine holds more than
/// `ceil(items / n_machines)` of them. Only machines that receive work get a
/// task; item order within a task follows `items`.
pub fn assign_tasks(config: &ModelConfig, items: impl IntoIterator<Item = u32>) -> Vec<MachineTask> {
    let mut tasks: Vec<MachineTask> = Vec::new();
    for (i, item) in items.into_iter().enumerate() {
        let machine_id = i % config.n_machines;
        if machine_id == tasks.len() {
            tasks.push(MachineTask {
                machine_id,
                work_items: Vec::new(),
            });
        }
        tasks[machine_id].work_items.push(item);
    }
    tasks
}

/// How machines within a round are executed. `Parallel` needs the
/// `parallel` feature and otherwise falls back to sequential execution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExecutionMode {
    #[default]
    Parallel,
    Sequential,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum WriteKind {
    Plain,
    Max,
}

/// Per-machine view of a round: reads hit the sealed input table, writes
/// land in a private buffer that is merged when the round commits.
pub struct Machine<'a> {
    id: usize,
    input: &'a KvTable,
    quota: Option<u64>,
    reads: u64,
    writes: u64,
    buffer: Vec<(Key, Word, WriteKind)>,
}

impl<'a> Machine<'a> {
    fn new(id: usize, input: &'a KvTable, quota: Option<u64>) -> Self {
        Machine {
            id,
            input,
            quota,
            reads: 0,
            writes: 0,
            buffer: Vec::new(),
        }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    /// Words charged so far: one per read, two (key and value) per write.
    pub fn words_used(&self) -> u64 {
        self.reads + 2 * self.writes
    }

    pub fn reads(&self) -> u64 {
        self.reads
    }

    pub fn writes(&self) -> u64 {
        self.writes
    }

    #[inline]
    fn charge(&mut self, words: u64) -> Result<(), RuntimeError> {
        if let Some(limit) = self.quota {
            if self.words_used() + words > limit {
                return Err(RuntimeError::QuotaExceeded {
                    machine: self.id,
                    limit,
                });
            }
        }
        Ok(())
    }

    /// Reads from the round's input table. Absent keys cost one word too.
    #[inline]
    pub fn read(&mut self, key: Key) -> Result<Option<Word>, RuntimeError> {
        self.charge(1)?;
        self.reads += 1;
        Ok(self.input.get(&key))
    }

    /// Reads a key the caller knows must exist.
    #[inline]
    pub fn read_present(&mut self, key: Key) -> Result<Word, RuntimeError> {
        self.read(key)?.ok_or(RuntimeError::MissingKey(key))
    }

    #[inline]
    pub fn write(&mut self, key: Key, value: Word) -> Result<(), RuntimeError> {
        self.charge(2)?;
        self.writes += 1;
        self.buffer.push((key, value, WriteKind::Plain));
        Ok(())
    }

    /// Combining write: concurrent `write_max` calls on one key keep the
    /// largest value instead of conflicting.
    #[inline]
    pub fn write_max(&mut self, key: Key, value: Word) -> Result<(), RuntimeError> {
        self.charge(2)?;
        self.writes += 1;
        self.buffer.push((key, value, WriteKind::Max));
        Ok(())
    }
}

struct MachineOutcome<T> {
    id: usize,
    reads: u64,
    writes: u64,
    buffer: Vec<(Key, Word, WriteKind)>,
    result: T,
}

/// Output of one committed round.
#[derive(Debug)]
pub struct RoundOutput<T> {
    pub table: KvTable,
    pub metrics: RoundMetrics,
    /// Per-machine return values, ordered by machine id.
    pub machine_results: Vec<T>,
}

/// Executes one synchronous round.
///
/// Every machine runs `logic` against the sealed `input`; writes stay
/// private until all machines finish and are then merged in machine-id
/// order. Equal writes to one key merge, differing plain writes fail with
/// [`RuntimeError::WriteConflict`]. The first error by machine id wins, so
/// failures are deterministic regardless of execution order.
pub fn run_round<T, F>(
    config: &ModelConfig,
    mode: ExecutionMode,
    round_index: u64,
    input: &KvTable,
    tasks: &[MachineTask],
    logic: F,
) -> Result<RoundOutput<T>, RuntimeError>
where
    T: Send,
    F: Fn(&mut Machine<'_>, &MachineTask) -> Result<T, RuntimeError> + Sync,
{
    let mut seen: Vec<bool> = Vec::new();
    for task in tasks {
        if task.machine_id >= config.n_machines {
            return Err(RuntimeError::UnknownMachine(task.machine_id));
        }
        if seen.len() <= task.machine_id {
            seen.resize(task.machine_id + 1, false);
        }
        if std::mem::replace(&mut seen[task.machine_id], true) {
            return Err(RuntimeError::DuplicateTask(task.machine_id));
        }
    }
    let quota = config.enforce_quotas.then_some(config.local_space);

    let run_one = |task: &MachineTask| -> Result<MachineOutcome<T>, (usize, RuntimeError)> {
        let mut machine = Machine::new(task.machine_id, input, quota);
        let result = logic(&mut machine, task).map_err(|e| (task.machine_id, e))?;
        Ok(MachineOutcome {
            id: machine.id,
            reads: machine.reads,
            writes: machine.writes,
            buffer: machine.buffer,
            result,
        })
    };

    let mut outcomes: Vec<Result<MachineOutcome<T>, (usize, RuntimeError)>> = match mode {
        #[cfg(feature = "parallel")]
        ExecutionMode::Parallel => {
            use rayon::prelude::*;
            tasks.par_iter().map(run_one).collect()
        }
        _ => tasks.iter().map(run_one).collect(),
    };
    // tasks may arrive in any order; commit in machine-id order
    outcomes.sort_by_key(|o| match o {
        Ok(o) => o.id,
        Err((id, _)) => *id,
    });
    let mut ok = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        ok.push(outcome.map_err(|(_, e)| e)?);
    }

    let total_writes: usize = ok.iter().map(|o| o.buffer.len()).sum();
    let mut merged: FxHashMap<Key, (Word, WriteKind)> =
        FxHashMap::with_capacity_and_hasher(total_writes, Default::default());
    let mut metrics = RoundMetrics {
        round_index,
        ..RoundMetrics::default()
    };
    let mut machine_results = Vec::with_capacity(ok.len());
    for outcome in ok {
        metrics.reads += outcome.reads;
        metrics.writes += outcome.writes;
        metrics.max_machine_reads = metrics.max_machine_reads.max(outcome.reads);
        metrics.max_machine_writes = metrics.max_machine_writes.max(outcome.writes);
        for (key, value, kind) in outcome.buffer {
            match merged.entry(key) {
                std::collections::hash_map::Entry::Vacant(slot) => {
                    slot.insert((value, kind));
                }
                std::collections::hash_map::Entry::Occupied(mut slot) => {
                    let (old, old_kind) = *slot.get();
                    match (old_kind, kind) {
                        (WriteKind::Max, WriteKind::Max) => {
                            slot.insert((old.max(value), kind));
                        }
                        (WriteKind::Plain, WriteKind::Plain) if old == value => {}
                        _ => return Err(RuntimeError::WriteConflict(key)),
                    }
                }
            }
        }
        machine_results.push(outcome.result);
    }
    let table: KvTable = merged.into_iter().map(|(k, (v, _))| (k, v)).collect();
    metrics.peak_live_words = input.word_count() + table.word_count();
    Ok(RoundOutput {
        table,
        metrics,
        machine_results,
    })
}

/// Sequential driver around [`run_round`] that numbers rounds and keeps the
/// metrics history.
#[derive(Clone, Debug)]
pub struct Simulator {
    config: ModelConfig,
    mode: ExecutionMode,
    history: Vec<RoundMetrics>,
}

impl Simulator {
    pub fn new(config: ModelConfig) -> Self {
        Simulator {
            config,
            mode: ExecutionMode::default(),
            history: Vec::new(),
        }
    }

    pub fn with_mode(mut self, mode: ExecutionMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn mode(&self) -> ExecutionMode {
        self.mode
    }

    pub fn history(&self) -> &[RoundMetrics] {
        &self.history
    }

    pub fn rounds(&self) -> usize {
        self.history.len()
    }

    pub fn tasks(&self, items: impl IntoIterator<Item = u32>) -> Vec<MachineTask> {
        assign_tasks(&self.config, items)
    }

    /// Runs a round and keeps only the output table.
    pub fn round<F>(&mut self, input: &KvTable, tasks: &[MachineTask], logic: F) -> Result<KvTable, RuntimeError>
    where
        F: Fn(&mut Machine<'_>, &MachineTask) -> Result<(), RuntimeError> + Sync,
    {
        Ok(self.round_with(input, tasks, logic)?.0)
    }

    /// Runs a round and also returns the per-machine results.
    pub fn round_with<T, F>(
        &mut self,
        input: &KvTable,
        tasks: &[MachineTask],
        logic: F,
    ) -> Result<(KvTable, Vec<T>), RuntimeError>
    where
        T: Send,
        F: Fn(&mut Machine<'_>, &MachineTask) -> Result<T, RuntimeError> + Sync,
    {
        let out = run_round(&self.config, self.mode, self.history.len() as u64, input, tasks, logic)?;
        self.history.push(out.metrics);
        Ok((out.table, out.machine_results))
    }
}
