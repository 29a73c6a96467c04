use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::tensor_train::MultiIndex;

/// Best-so-far state after one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub evals: usize,
    pub best_y: f64,
    pub best_x: MultiIndex,
    pub t_s: f64,
}

/// Per-iteration history of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
}

impl RunTrace {
    /// Writes one JSON object per line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Reads records back, skipping lines that are not trace records
    /// (such as a header line).
    pub fn read_jsonl<R: BufRead>(input: R) -> io::Result<Self> {
        let mut records = Vec::new();
        for line in input.lines() {
            let line = line?;
            if let Ok(r) = serde_json::from_str::<TraceRecord>(&line) {
                records.push(r);
            }
        }
        Ok(RunTrace { records })
    }

    /// Zeroes wall-clock fields so that files are reproducible byte for byte.
    pub fn without_timing(&self) -> Self {
        let records = self
            .records
            .iter()
            .map(|r| TraceRecord { t_s: 0.0, ..r.clone() })
            .collect();
        RunTrace { records }
    }

    /// `best_y` never increases and `evals` grows by exactly `k` per record.
    pub fn is_consistent(&self, k: usize, budget: usize) -> bool {
        self.records.windows(2).all(|w| w[1].best_y <= w[0].best_y && w[1].evals == w[0].evals + k)
            && self.records.iter().all(|r| r.evals <= budget)
    }
}
