//! Merging per-thread logs and replaying the global sequence into exact
//! per-deletion rank errors and per-element delays.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use multiqueue::{LogRecord, OpKind};
use thiserror::Error;

use crate::report::QualityReport;
use crate::stat_tree::StatTree;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("record {position}: delete of element (key {key}, id {elem_id}) that is not live")]
    UnknownElement {
        position: usize,
        key: u32,
        elem_id: u64,
    },
    #[error("record {position}: insert of element (key {key}, id {elem_id}) that is already live")]
    DuplicateElement {
        position: usize,
        key: u32,
        elem_id: u64,
    },
}

/// Merges per-thread logs (each sorted by timestamp) into one global
/// sequence, ordered by timestamp with ties broken by thread id.
pub fn merge_logs(logs: &[Vec<LogRecord>]) -> Vec<LogRecord> {
    for log in logs {
        debug_assert!(
            log.windows(2).all(|w| w[0].timestamp <= w[1].timestamp),
            "per-thread log not sorted by timestamp"
        );
    }
    let total = logs.iter().map(Vec::len).sum();
    let mut merged = Vec::with_capacity(total);
    let mut cursors = vec![0usize; logs.len()];
    let mut heap: BinaryHeap<Reverse<(u64, u32, usize)>> = logs
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(src, l)| Reverse((l[0].timestamp, l[0].thread, src)))
        .collect();
    while let Some(Reverse((_, _, src))) = heap.pop() {
        let rec = logs[src][cursors[src]];
        merged.push(rec);
        cursors[src] += 1;
        if let Some(next) = logs[src].get(cursors[src]) {
            heap.push(Reverse((next.timestamp, next.thread, src)));
        }
    }
    merged
}

/// Sequentially replays a merged log.
///
/// Each successful deletion scores a rank error equal to the number of
/// live elements with strictly smaller keys, and each of those elements is
/// delayed by one. A failed deletion scores the current live size and
/// delays nothing. An element's delay is finalized when it is deleted;
/// elements still live at the end of the log are reported separately.
pub fn replay(log: &[LogRecord]) -> Result<QualityReport, ReplayError> {
    let mut tree = StatTree::new();
    let mut rank_errors = Vec::new();
    let mut deleted_delays = Vec::new();
    let mut inserts = 0u64;
    let mut failed_deletes = 0u64;

    for (position, rec) in log.iter().enumerate() {
        match rec.kind {
            OpKind::Insert => {
                if !tree.insert(rec.key, rec.elem_id) {
                    return Err(ReplayError::DuplicateElement {
                        position,
                        key: rec.key,
                        elem_id: rec.elem_id,
                    });
                }
                inserts += 1;
            }
            OpKind::DeleteSuccess => {
                let rank = tree.rank_lower(rec.key);
                tree.add_delay_prefix(rank);
                let delay =
                    tree.remove(rec.key, rec.elem_id)
                        .ok_or(ReplayError::UnknownElement {
                            position,
                            key: rec.key,
                            elem_id: rec.elem_id,
                        })?;
                rank_errors.push(rank as u64);
                deleted_delays.push(delay);
            }
            OpKind::DeleteFail => {
                rank_errors.push(tree.len() as u64);
                failed_deletes += 1;
            }
        }
    }

    let surviving_delays = tree.survivors().into_iter().map(|(_, d)| d).collect();
    Ok(QualityReport {
        rank_errors,
        deleted_delays,
        surviving_delays,
        inserts,
        failed_deletes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(ts: u64, thread: u32, kind: OpKind, key: u32, elem_id: u64) -> LogRecord {
        LogRecord {
            timestamp: ts,
            thread,
            kind,
            key,
            elem_id,
        }
    }

    #[test]
    fn merge_of_single_log_is_identity() {
        let log = vec![
            rec(1, 0, OpKind::Insert, 5, 1),
            rec(2, 0, OpKind::DeleteSuccess, 5, 1),
        ];
        assert_eq!(merge_logs(&[log.clone()]), log);
    }

    #[test]
    fn merge_interleaves_by_timestamp() {
        let a = vec![rec(1, 0, OpKind::Insert, 1, 1), rec(4, 0, OpKind::Insert, 2, 2)];
        let b = vec![rec(2, 1, OpKind::Insert, 3, 3), rec(3, 1, OpKind::Insert, 4, 4)];
        let merged = merge_logs(&[a, b]);
        let ts: Vec<u64> = merged.iter().map(|r| r.timestamp).collect();
        assert_eq!(ts, vec![1, 2, 3, 4]);
    }

    #[test]
    fn merge_breaks_timestamp_ties_by_thread() {
        let a = vec![rec(5, 1, OpKind::Insert, 1, 1)];
        let b = vec![rec(5, 0, OpKind::Insert, 2, 2)];
        let merged = merge_logs(&[a, b]);
        assert_eq!(merged[0].thread, 0);
        assert_eq!(merged[1].thread, 1);
    }

    #[test]
    fn merge_matches_sort_oracle() {
        use rand::rngs::SmallRng;
        use rand::{Rng, SeedableRng};
        let mut rng = SmallRng::seed_from_u64(31);
        let logs: Vec<Vec<LogRecord>> = (0..4u32)
            .map(|t| {
                let mut ts = 0u64;
                (0..200)
                    .map(|i| {
                        ts += rng.random_range(0..5);
                        rec(ts, t, OpKind::Insert, i, (t as u64) << 32 | i as u64)
                    })
                    .collect()
            })
            .collect();
        let merged = merge_logs(&logs);
        let mut oracle: Vec<LogRecord> = logs.into_iter().flatten().collect();
        oracle.sort_by_key(|r| (r.timestamp, r.thread));
        assert_eq!(merged, oracle);
    }

    #[test]
    fn delete_of_second_smallest_scores_one() {
        let log = vec![
            rec(1, 0, OpKind::Insert, 5, 1),
            rec(2, 0, OpKind::Insert, 3, 2),
            rec(3, 0, OpKind::DeleteSuccess, 5, 1),
        ];
        let report = replay(&log).unwrap();
        assert_eq!(report.rank_errors, vec![1]);
        assert_eq!(report.deleted_delays, vec![0]);
        // the overtaken element (key 3) survives with one unit of delay
        assert_eq!(report.surviving_delays, vec![1]);
    }

    #[test]
    fn exact_delete_scores_zero() {
        let log = vec![
            rec(1, 0, OpKind::Insert, 1, 1),
            rec(2, 0, OpKind::DeleteSuccess, 1, 1),
        ];
        let report = replay(&log).unwrap();
        assert_eq!(report.rank_errors, vec![0]);
        assert_eq!(report.deleted_delays, vec![0]);
    }

    #[test]
    fn failed_delete_scores_live_size() {
        let log = vec![
            rec(1, 0, OpKind::Insert, 4, 1),
            rec(2, 0, OpKind::Insert, 9, 2),
            rec(3, 0, OpKind::DeleteFail, 0, 0),
        ];
        let report = replay(&log).unwrap();
        assert_eq!(report.rank_errors, vec![2]);
        assert_eq!(report.failed_deletes, 1);
        assert_eq!(report.deleted_delays, Vec::<u64>::new());
    }

    #[test]
    fn equal_keys_do_not_count_as_smaller() {
        let log = vec![
            rec(1, 0, OpKind::Insert, 7, 1),
            rec(2, 0, OpKind::Insert, 7, 2),
            rec(3, 0, OpKind::DeleteSuccess, 7, 2),
        ];
        let report = replay(&log).unwrap();
        assert_eq!(report.rank_errors, vec![0]);
        // the other 7 was not delayed
        assert_eq!(report.surviving_delays, vec![0]);
    }

    #[test]
    fn corrupt_log_is_a_hard_error() {
        let log = vec![rec(1, 0, OpKind::DeleteSuccess, 5, 1)];
        assert_eq!(
            replay(&log).err(),
            Some(ReplayError::UnknownElement {
                position: 0,
                key: 5,
                elem_id: 1
            })
        );
        let log = vec![
            rec(1, 0, OpKind::Insert, 5, 1),
            rec(2, 0, OpKind::Insert, 5, 1),
        ];
        assert_eq!(
            replay(&log).err(),
            Some(ReplayError::DuplicateElement {
                position: 1,
                key: 5,
                elem_id: 1
            })
        );
    }
}
