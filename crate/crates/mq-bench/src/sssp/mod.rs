//! Parallel single-source shortest paths on top of the relaxed queue.
//!
//! Each worker pops `(distance, node)` pairs, drops entries that are stale
//! against the shared tentative-distance array, relaxes outgoing edges with
//! a compare-and-swap minimum, and reinserts improved nodes. Because a
//! failed deleteMin proves nothing about global emptiness, the run ends
//! through a dedicated protocol: every thread must observe its designated
//! queues empty in an epoch with no intervening insertion, where every
//! completed insertion bumps a global epoch counter and every thread
//! withdraws its own confirmation before attempting a pop.

pub mod dijkstra;
pub mod graph;

pub use dijkstra::{sequential_dijkstra, UNREACHED};
pub use graph::{load_graph, Graph, GraphError, GraphFormat};

use std::sync::atomic::{AtomicBool, AtomicU32, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use multiqueue::spq::DaryHeap;
use multiqueue::{CachePadded, ConfigError, Element, MqConfig, MultiQueue};

const NOT_CONFIRMED: u64 = u64::MAX;

#[derive(Clone, Debug)]
pub struct SsspConfig {
    pub threads: usize,
    pub factor: usize,
    pub stickiness: usize,
    pub buffer_size: usize,
    pub seed: u64,
    /// Stress-testing aid: widens the window between an insertion and its
    /// epoch bump, so termination races get every chance to show up.
    pub insert_delay: Option<Duration>,
}

impl SsspConfig {
    pub fn new(threads: usize) -> Self {
        SsspConfig {
            threads,
            factor: 2,
            stickiness: 1,
            buffer_size: 16,
            seed: 1,
            insert_delay: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SsspStats {
    pub time_ms: f64,
    /// Elements popped from the queue, stale ones included.
    pub extracted: u64,
    /// Nodes that passed the staleness filter and were relaxed.
    pub processed: u64,
    pub reachable: u64,
    /// processed / reachable; 1.0 means no node was relaxed twice.
    pub overhead_ratio: f64,
}

struct Termination {
    epoch: AtomicU64,
    confirmed: Vec<CachePadded<AtomicU64>>,
    done: AtomicBool,
}

impl Termination {
    fn new(threads: usize) -> Self {
        Termination {
            epoch: AtomicU64::new(0),
            confirmed: (0..threads)
                .map(|_| CachePadded::new(AtomicU64::new(NOT_CONFIRMED)))
                .collect(),
            done: AtomicBool::new(false),
        }
    }
}

/// Locks each of the caller's designated queues in turn and reports
/// whether all of them were empty. A queue whose lock is unavailable
/// counts as nonempty: somebody is working on it.
pub fn emptiness_check(mq: &MultiQueue<DaryHeap>, thread_id: usize) -> bool {
    let per_thread = mq.config().queue_factor;
    let start = thread_id * per_thread;
    (start..start + per_thread).all(|q| mq.try_probe_empty(q) == Some(true))
}

pub fn parallel_sssp(
    g: &Graph,
    source: u32,
    cfg: &SsspConfig,
) -> Result<(Vec<u32>, SsspStats), ConfigError> {
    assert!((source as usize) < g.num_nodes(), "source out of range");
    let mut mq_cfg = MqConfig::new(cfg.threads);
    mq_cfg.queue_factor = cfg.factor;
    mq_cfg.buffer_size = cfg.buffer_size;
    mq_cfg.stickiness = cfg.stickiness;
    mq_cfg.seed = cfg.seed;
    mq_cfg.spq_capacity = (4 * g.num_nodes() / mq_cfg.num_queues()).max(1024);
    let mq: MultiQueue<DaryHeap> = MultiQueue::new(mq_cfg)?;

    let dist: Vec<AtomicU32> = (0..g.num_nodes()).map(|_| AtomicU32::new(UNREACHED)).collect();
    dist[source as usize].store(0, Ordering::Relaxed);
    let term = Termination::new(cfg.threads);

    let start = Instant::now();
    let per_thread: Vec<(u64, u64)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..cfg.threads)
            .map(|t| {
                let (mq, dist, term, g) = (&mq, &dist, &term, g);
                s.spawn(move || worker(t, g, source, mq, dist, term, cfg.insert_delay))
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let time_ms = start.elapsed().as_secs_f64() * 1e3;

    let distances: Vec<u32> = dist.into_iter().map(AtomicU32::into_inner).collect();
    let reachable = distances.iter().filter(|&&d| d != UNREACHED).count() as u64;
    let extracted = per_thread.iter().map(|(e, _)| e).sum();
    let processed = per_thread.iter().map(|(_, p)| p).sum();
    let stats = SsspStats {
        time_ms,
        extracted,
        processed,
        reachable,
        overhead_ratio: processed as f64 / reachable.max(1) as f64,
    };
    Ok((distances, stats))
}

fn worker(
    t: usize,
    g: &Graph,
    source: u32,
    mq: &MultiQueue<DaryHeap>,
    dist: &[AtomicU32],
    term: &Termination,
    insert_delay: Option<Duration>,
) -> (u64, u64) {
    let mut handle = mq.handle(t);
    if t == 0 {
        handle.insert(Element::new(0, source));
        term.epoch.fetch_add(1, Ordering::SeqCst);
    }
    let mut extracted = 0u64;
    let mut processed = 0u64;
    let mut idle_rounds = 0u32;

    'run: loop {
        if term.done.load(Ordering::Acquire) {
            break;
        }
        // Withdraw our confirmation before the pop can take effect, so the
        // run can never be declared finished while we hold work.
        term.confirmed[t].store(NOT_CONFIRMED, Ordering::SeqCst);
        match handle.delete_min() {
            Some(el) => {
                idle_rounds = 0;
                extracted += 1;
                let node = el.value;
                let d = el.key;
                if d > dist[node as usize].load(Ordering::Relaxed) {
                    continue; // stale entry
                }
                processed += 1;
                for (target, weight) in g.neighbors(node) {
                    let nd = d.saturating_add(weight);
                    if nd == UNREACHED {
                        continue;
                    }
                    let mut cur = dist[target as usize].load(Ordering::Relaxed);
                    while nd < cur {
                        match dist[target as usize].compare_exchange_weak(
                            cur,
                            nd,
                            Ordering::Relaxed,
                            Ordering::Relaxed,
                        ) {
                            Ok(_) => {
                                handle.insert(Element::new(nd, target));
                                if let Some(delay) = insert_delay {
                                    spin_for(delay);
                                }
                                // Published after the element landed: any
                                // emptiness confirmation read before this
                                // bump is thereby invalidated.
                                term.epoch.fetch_add(1, Ordering::SeqCst);
                                break;
                            }
                            Err(seen) => cur = seen,
                        }
                    }
                }
            }
            None => {
                let e0 = term.epoch.load(Ordering::SeqCst);
                if !emptiness_check(mq, t) {
                    idle_rounds += 1;
                    backoff(idle_rounds);
                    continue;
                }
                term.confirmed[t].store(e0, Ordering::SeqCst);
                // Passive wait: resume popping once anyone inserts, finish
                // once every thread confirmed this same epoch.
                loop {
                    if term.done.load(Ordering::Acquire) {
                        break 'run;
                    }
                    if term.epoch.load(Ordering::SeqCst) != e0 {
                        break;
                    }
                    if term
                        .confirmed
                        .iter()
                        .all(|c| c.load(Ordering::SeqCst) == e0)
                    {
                        term.done.store(true, Ordering::Release);
                        break 'run;
                    }
                    idle_rounds += 1;
                    backoff(idle_rounds);
                }
            }
        }
    }
    (extracted, processed)
}

fn backoff(round: u32) {
    if round % 64 == 0 {
        std::thread::yield_now();
    } else {
        std::hint::spin_loop();
    }
}

fn spin_for(d: Duration) {
    let t0 = Instant::now();
    while t0.elapsed() < d {
        std::hint::spin_loop();
    }
}
