//! Mixed insert/deleteMin workloads: timed throughput runs and logged
//! quality runs.
//!
//! Every worker repeatedly flips a fair coin between inserting a fresh
//! uniform key and calling deleteMin, which keeps the queue size stable
//! around the prefill. Element payloads encode (thread, counter) so every
//! live element is unique and logged runs can be replayed exactly.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Barrier;
use std::time::{Duration, Instant};

use multiqueue::spq::{DaryHeap, MergingHeap, SequentialQueue};
use multiqueue::{derive_rng_seed, Element, MqConfig, MultiQueue, OpStats, ThreadHandle};
use quality::{merge_logs, replay, QualityReport, ReplayError};
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

use crate::config::{BenchConfig, HeapKind};
use crate::util;

/// Salt separating workload key streams from the queue's internal ones.
const KEY_STREAM_SALT: u64 = 0x6b65_795f_7374_7265;
const PREFILL_STREAM: u64 = u64::MAX;

/// Fills the queue with `n0` uniformly distributed keys through one
/// handle; payloads are `0..n0`. Deterministic for a given seed.
pub fn prefill<S: SequentialQueue>(handle: &mut ThreadHandle<'_, S>, n0: usize, seed: u64) {
    assert!(n0 <= u32::MAX as usize, "prefill too large for 32-bit payloads");
    let mut rng = SmallRng::seed_from_u64(derive_rng_seed(seed ^ KEY_STREAM_SALT, PREFILL_STREAM));
    for value in 0..n0 as u32 {
        handle.insert(Element::new(rng.random::<u32>(), value));
    }
}

/// Unique payload for the `i`-th insertion of worker `t`.
fn worker_value(prefill: usize, threads: usize, t: usize, i: u64) -> u32 {
    let v = prefill as u64 + i * threads as u64 + t as u64;
    u32::try_from(v).expect("payload space exhausted; shorten the run")
}

#[derive(Clone, Debug)]
pub struct ThroughputRun {
    pub elapsed_secs: f64,
    pub per_thread_ops: Vec<u64>,
    pub total_ops: u64,
    pub mops_per_sec: f64,
}

#[derive(Clone, Debug)]
pub struct ThroughputResult {
    pub runs: Vec<ThroughputRun>,
}

impl ThroughputResult {
    pub fn mean_mops(&self) -> f64 {
        self.runs.iter().map(|r| r.mops_per_sec).sum::<f64>() / self.runs.len().max(1) as f64
    }
}

pub fn run_throughput(cfg: &BenchConfig) -> ThroughputResult {
    match cfg.heap {
        HeapKind::Dary8 => run_throughput_with::<DaryHeap>(cfg),
        HeapKind::Merging16 => run_throughput_with::<MergingHeap>(cfg),
    }
}

fn run_throughput_with<S: SequentialQueue + Send>(cfg: &BenchConfig) -> ThroughputResult {
    let runs = (0..cfg.runs.max(1))
        .map(|run| {
            let run_seed = cfg.seed.wrapping_add(run as u64);
            let mut mq_cfg = cfg.mq_config();
            mq_cfg.seed = run_seed;
            sized_capacity(&mut mq_cfg, cfg.prefill);
            let mq: MultiQueue<S> = MultiQueue::new(mq_cfg).expect("invalid configuration");
            let stop = AtomicBool::new(false);
            let barrier = Barrier::new(cfg.threads + 1);

            let (elapsed, per_thread_ops) = std::thread::scope(|s| {
                let workers: Vec<_> = (0..cfg.threads)
                    .map(|t| {
                        let (mq, stop, barrier) = (&mq, &stop, &barrier);
                        s.spawn(move || {
                            let pinned = !cfg.pin_threads || util::pin_current_thread(t);
                            let mut handle = mq.handle(t);
                            if t == 0 {
                                prefill(&mut handle, cfg.prefill, run_seed);
                            }
                            let mut rng = SmallRng::seed_from_u64(derive_rng_seed(
                                run_seed ^ KEY_STREAM_SALT,
                                t as u64,
                            ));
                            barrier.wait();
                            let mut ops = 0u64;
                            let mut inserts = 0u64;
                            while !stop.load(Ordering::Relaxed) {
                                if rng.random_bool(0.5) {
                                    let value =
                                        worker_value(cfg.prefill, cfg.threads, t, inserts);
                                    inserts += 1;
                                    handle.insert(Element::new(rng.random::<u32>(), value));
                                } else {
                                    handle.delete_min();
                                }
                                ops += 1;
                            }
                            (ops, pinned)
                        })
                    })
                    .collect();
                barrier.wait();
                let t0 = Instant::now();
                std::thread::sleep(Duration::from_secs_f64(cfg.duration_secs));
                stop.store(true, Ordering::Relaxed);
                let results: Vec<(u64, bool)> =
                    workers.into_iter().map(|w| w.join().unwrap()).collect();
                if cfg.pin_threads && results.iter().any(|(_, pinned)| !pinned) {
                    eprintln!("warning: thread pinning unavailable; running unpinned");
                }
                (t0.elapsed(), results.into_iter().map(|(ops, _)| ops).collect::<Vec<_>>())
            });

            let total_ops: u64 = per_thread_ops.iter().sum();
            let elapsed_secs = elapsed.as_secs_f64();
            ThroughputRun {
                elapsed_secs,
                total_ops,
                mops_per_sec: total_ops as f64 / (1e6 * elapsed_secs),
                per_thread_ops,
            }
        })
        .collect();
    ThroughputResult { runs }
}

#[derive(Debug)]
pub struct QualityOutcome {
    pub report: QualityReport,
    pub elapsed_secs: f64,
    pub per_thread_stats: Vec<OpStats>,
    /// The merged global log, in replay order.
    pub log: Vec<multiqueue::LogRecord>,
}

pub fn run_quality(cfg: &BenchConfig) -> Result<QualityOutcome, ReplayError> {
    match cfg.heap {
        HeapKind::Dary8 => run_quality_with::<DaryHeap>(cfg),
        HeapKind::Merging16 => run_quality_with::<MergingHeap>(cfg),
    }
}

fn run_quality_with<S: SequentialQueue + Send>(
    cfg: &BenchConfig,
) -> Result<QualityOutcome, ReplayError> {
    let mut mq_cfg = cfg.mq_config();
    sized_capacity(&mut mq_cfg, cfg.prefill);
    let mq: MultiQueue<S> = MultiQueue::new(mq_cfg).expect("invalid configuration");
    let deletes_done = AtomicU64::new(0);
    let barrier = Barrier::new(cfg.threads);
    let target = cfg.delete_target;
    // Worst case one thread performs nearly the whole workload.
    let log_capacity = 2 * target as usize + 16_384;

    let start = Instant::now();
    let results: Vec<(Vec<multiqueue::LogRecord>, OpStats)> = std::thread::scope(|s| {
        let workers: Vec<_> = (0..cfg.threads)
            .map(|t| {
                let (mq, barrier, deletes_done) = (&mq, &barrier, &deletes_done);
                s.spawn(move || {
                    if cfg.pin_threads {
                        util::pin_current_thread(t);
                    }
                    let capacity = log_capacity + if t == 0 { cfg.prefill } else { 0 };
                    let mut handle = mq.handle_with_log(t, capacity);
                    if t == 0 {
                        prefill(&mut handle, cfg.prefill, cfg.seed);
                    }
                    let mut rng = SmallRng::seed_from_u64(derive_rng_seed(
                        cfg.seed ^ KEY_STREAM_SALT,
                        t as u64,
                    ));
                    barrier.wait();
                    let mut inserts = 0u64;
                    while deletes_done.load(Ordering::Relaxed) < target {
                        if rng.random_bool(0.5) {
                            let value = worker_value(cfg.prefill, cfg.threads, t, inserts);
                            inserts += 1;
                            handle.insert(Element::new(rng.random::<u32>(), value));
                        } else {
                            handle.delete_min();
                            deletes_done.fetch_add(1, Ordering::Relaxed);
                        }
                    }
                    (handle.take_log().unwrap().into_records(), handle.stats().clone())
                })
            })
            .collect();
        workers.into_iter().map(|w| w.join().unwrap()).collect()
    });
    let elapsed_secs = start.elapsed().as_secs_f64();

    let (logs, per_thread_stats): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let log = merge_logs(&logs);
    let report = replay(&log)?;
    Ok(QualityOutcome {
        report,
        elapsed_secs,
        per_thread_stats,
        log,
    })
}

/// Preallocate queues for the expected load instead of the default; keeps
/// small benchmark configurations from reserving gigabytes.
fn sized_capacity(cfg: &mut MqConfig, prefill: usize) {
    let expected = 4 * prefill / cfg.num_queues();
    cfg.spq_capacity = expected.clamp(1024, 1 << 20);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefill_conserves_count_and_is_deterministic() {
        let collect = || {
            let mut cfg = MqConfig::new(1);
            cfg.spq_capacity = 4096;
            let mut mq: MultiQueue<DaryHeap> = MultiQueue::new(cfg).unwrap();
            {
                let mut h = mq.handle(0);
                prefill(&mut h, 100, 7);
            }
            let mut elems = mq.drain();
            elems.sort_by_key(|e| (e.key, e.value));
            elems
        };
        let a = collect();
        assert_eq!(a.len(), 100);
        assert_eq!(a, collect());
    }

    #[test]
    fn worker_values_never_collide() {
        use std::collections::HashSet;
        let mut seen = HashSet::new();
        for t in 0..4 {
            for i in 0..100 {
                assert!(seen.insert(worker_value(1000, 4, t, i)));
            }
        }
        assert!(seen.iter().all(|&v| v >= 1000));
    }

    #[test]
    fn tiny_throughput_run_reports_consistent_ops() {
        let mut cfg = BenchConfig::new(2);
        cfg.prefill = 1000;
        cfg.duration_secs = 0.05;
        cfg.runs = 2;
        cfg.pin_threads = false;
        let result = run_throughput(&cfg);
        assert_eq!(result.runs.len(), 2);
        for run in &result.runs {
            assert_eq!(run.total_ops, run.per_thread_ops.iter().sum::<u64>());
            assert!(run.total_ops > 0);
            let recomputed = run.total_ops as f64 / (1e6 * run.elapsed_secs);
            assert!((run.mops_per_sec - recomputed).abs() < 1e-9);
        }
        assert!(result.mean_mops() > 0.0);
    }

    #[test]
    fn exact_sequential_quality_run_has_zero_rank_error() {
        let mut cfg = BenchConfig::new(1);
        cfg.factor = 1;
        cfg.prefill = 500;
        cfg.delete_target = 2000;
        cfg.pin_threads = false;
        let outcome = run_quality(&cfg).unwrap();
        assert!(outcome.report.deletes() >= 2000);
        assert_eq!(outcome.report.max_rank_error(), 0);
        assert_eq!(outcome.report.total_delay(), 0);
    }

    #[test]
    fn quality_report_counts_match_logged_deletes() {
        let mut cfg = BenchConfig::new(2);
        cfg.factor = 2;
        cfg.prefill = 200;
        cfg.delete_target = 1000;
        cfg.pin_threads = false;
        let outcome = run_quality(&cfg).unwrap();
        let logged_deletes = outcome
            .log
            .iter()
            .filter(|r| {
                matches!(
                    r.kind,
                    quality::OpKind::DeleteSuccess | quality::OpKind::DeleteFail
                )
            })
            .count() as u64;
        assert_eq!(outcome.report.deletes(), logged_deletes);
        assert!(outcome
            .log
            .windows(2)
            .all(|w| w[0].timestamp <= w[1].timestamp));
    }
}
