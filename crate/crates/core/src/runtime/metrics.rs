use std::io::{self, Write};

use serde::{Deserialize, Serialize};

/// Counters for one committed round.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundMetrics {
    pub round_index: u64,
    pub reads: u64,
    pub writes: u64,
    pub max_machine_reads: u64,
    pub max_machine_writes: u64,
    /// Input words plus output words of the round.
    pub peak_live_words: u64,
}

/// Aggregate over a metrics history.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub total_rounds: u64,
    pub total_reads: u64,
    pub total_writes: u64,
    pub max_peak_live_words: u64,
}

pub fn metrics_report(history: &[RoundMetrics]) -> MetricsSummary {
    history.iter().fold(MetricsSummary::default(), |acc, r| MetricsSummary {
        total_rounds: acc.total_rounds + 1,
        total_reads: acc.total_reads + r.reads,
        total_writes: acc.total_writes + r.writes,
        max_peak_live_words: acc.max_peak_live_words.max(r.peak_live_words),
    })
}

/// One JSON object per line, one line per round.
pub fn write_metrics_jsonl<W: Write>(history: &[RoundMetrics], mut out: W) -> io::Result<()> {
    for r in history {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
