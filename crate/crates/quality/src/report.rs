//! Aggregated replay results and their CSV serialization.

use std::collections::BTreeMap;
use std::io::{self, Write};

/// Exact quality measurements for one replayed run.
#[derive(Clone, Debug, Default)]
pub struct QualityReport {
    /// One entry per deleteMin operation, in replay order. Failed
    /// deletions score the live size at that moment.
    pub rank_errors: Vec<u64>,
    /// Final delay of every deleted element, in deletion order.
    pub deleted_delays: Vec<u64>,
    /// Accumulated delay of elements still live at the end of the log.
    /// Kept out of the headline delay statistics.
    pub surviving_delays: Vec<u64>,
    pub inserts: u64,
    pub failed_deletes: u64,
}

impl QualityReport {
    /// Total deleteMin operations, failed ones included.
    pub fn deletes(&self) -> u64 {
        self.rank_errors.len() as u64
    }

    pub fn successful_deletes(&self) -> u64 {
        self.deleted_delays.len() as u64
    }

    pub fn mean_rank_error(&self) -> f64 {
        mean(&self.rank_errors)
    }

    pub fn mean_delay(&self) -> f64 {
        mean(&self.deleted_delays)
    }

    pub fn max_rank_error(&self) -> u64 {
        self.rank_errors.iter().copied().max().unwrap_or(0)
    }

    pub fn max_delay(&self) -> u64 {
        self.deleted_delays.iter().copied().max().unwrap_or(0)
    }

    pub fn total_rank_error(&self) -> u64 {
        self.rank_errors.iter().sum()
    }

    /// Total delay handed out, to deleted and surviving elements alike.
    pub fn total_delay(&self) -> u64 {
        self.deleted_delays.iter().sum::<u64>() + self.surviving_delays.iter().sum::<u64>()
    }

    /// Empirical fraction of deletions with rank error strictly above `k`.
    pub fn rank_error_survival(&self, k: u64) -> f64 {
        if self.rank_errors.is_empty() {
            return 0.0;
        }
        let above = self.rank_errors.iter().filter(|&&r| r > k).count();
        above as f64 / self.rank_errors.len() as f64
    }

    /// Writes `metric,percentile,value` rows for both metrics.
    pub fn write_summary_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "metric,percentile,value")?;
        for (metric, values) in [
            ("rank_error", &self.rank_errors),
            ("delay", &self.deleted_delays),
        ] {
            let mut sorted = values.clone();
            sorted.sort_unstable();
            writeln!(w, "{metric},count,{}", sorted.len())?;
            writeln!(w, "{metric},mean,{}", mean(&sorted))?;
            for (name, q) in [("p50", 0.50), ("p90", 0.90), ("p99", 0.99), ("p999", 0.999)] {
                writeln!(w, "{metric},{name},{}", percentile(&sorted, q))?;
            }
            writeln!(w, "{metric},max,{}", sorted.last().copied().unwrap_or(0))?;
        }
        Ok(())
    }

    pub fn write_rank_error_histogram_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "rank_error,count")?;
        for (value, count) in histogram(&self.rank_errors) {
            writeln!(w, "{value},{count}")?;
        }
        Ok(())
    }

    pub fn write_delay_histogram_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "delay,count")?;
        for (value, count) in histogram(&self.deleted_delays) {
            writeln!(w, "{value},{count}")?;
        }
        Ok(())
    }
}

fn mean(values: &[u64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().map(|&v| v as f64).sum::<f64>() / values.len() as f64
}

/// Nearest-rank percentile over an already sorted slice.
fn percentile(sorted: &[u64], q: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let rank = ((sorted.len() as f64 * q).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

pub fn histogram(values: &[u64]) -> BTreeMap<u64, u64> {
    let mut h = BTreeMap::new();
    for &v in values {
        *h.entry(v).or_insert(0) += 1;
    }
    h
}
