//! Simulation of the adaptive massively parallel computation model.
//!
//! A computation is a sequence of synchronous rounds. In each round every
//! machine may adaptively read the round's sealed input table and buffer
//! writes; the merged writes become visible only in the next round. Reads
//! and writes are charged in words against the per-machine budget `S`, and
//! every round reports its live words so total space can be checked against
//! `T` after the fact.

mod metrics;
mod round;
mod table;

pub use metrics::{metrics_report, write_metrics_jsonl, MetricsSummary, RoundMetrics};
pub(crate) use round::mix64;
pub use round::{
    assign_tasks, run_round, ExecutionMode, Machine, MachineTask, ModelConfig, RoundOutput, Simulator, MIN_LOCAL_SPACE,
};
pub use table::{Key, KvTable, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuntimeError {
    #[error("machine {machine} exceeded its local space of {limit} words")]
    QuotaExceeded { machine: usize, limit: u64 },
    #[error("conflicting writes to key {0}")]
    WriteConflict(Key),
    #[error("expected key {0} to be present")]
    MissingKey(Key),
    #[error("task references machine {0} outside the configured range")]
    UnknownMachine(usize),
    #[error("machine {0} received two tasks in one round")]
    DuplicateTask(usize),
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
    #[error("table decode error: {0}")]
    Decode(String),
}
