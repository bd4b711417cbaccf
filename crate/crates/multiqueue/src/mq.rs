//! The concurrent queue: an array of `c * p` lock-protected sequential
//! queues. Insertions go to one queue, chosen randomly or stickily;
//! deletions inspect the cached minima of two queues and delete from the
//! smaller one. Locks are only ever try-acquired, never waited on, so with
//! more queues than threads every operation finishes in expected constant
//! attempts.

use std::cell::UnsafeCell;
use std::ops::{Deref, DerefMut};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::buffered::BufferedSpq;
use crate::log::{LogRecord, OpKind, OpLog};
use crate::pad::CachePadded;
use crate::spq::SequentialQueue;
use crate::Element;

/// Value stored in `cached_min` when a queue is empty. It is outside the
/// 32-bit key range, so every real key compares smaller and the full key
/// range stays usable.
const EMPTY_MIN: u64 = u64::MAX;

/// Construction parameters.
#[derive(Clone, Debug)]
pub struct MqConfig {
    /// Number of threads `p` that will operate on the queue.
    pub threads: usize,
    /// Queues per thread `c`; the queue array has `c * p` entries.
    pub queue_factor: usize,
    /// Capacity `b` of the insertion and deletion buffers.
    pub buffer_size: usize,
    /// How many consecutive operations a thread reuses a chosen queue.
    /// `1` disables stickiness.
    pub stickiness: usize,
    /// Elements preallocated per sequential queue.
    pub spq_capacity: usize,
    /// Seed from which all per-thread generators are derived.
    pub seed: u64,
}

impl MqConfig {
    pub fn new(threads: usize) -> Self {
        MqConfig {
            threads,
            queue_factor: 4,
            buffer_size: 16,
            stickiness: 1,
            spq_capacity: 1 << 20,
            seed: 0,
        }
    }

    pub fn num_queues(&self) -> usize {
        self.threads * self.queue_factor
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.threads == 0 {
            return Err(ConfigError::ZeroThreads);
        }
        if self.queue_factor == 0 {
            return Err(ConfigError::ZeroFactor);
        }
        if self.buffer_size == 0 || self.buffer_size > 256 {
            return Err(ConfigError::BadBufferSize(self.buffer_size));
        }
        if self.stickiness == 0 {
            return Err(ConfigError::ZeroStickiness);
        }
        if self.spq_capacity == 0 {
            return Err(ConfigError::ZeroCapacity);
        }
        if self.threads.checked_mul(self.queue_factor).is_none() {
            return Err(ConfigError::TooManyQueues);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("thread count must be at least 1")]
    ZeroThreads,
    #[error("queue factor must be at least 1")]
    ZeroFactor,
    #[error("buffer size must be in 1..=256, got {0}")]
    BadBufferSize(usize),
    #[error("stickiness must be at least 1")]
    ZeroStickiness,
    #[error("per-queue capacity must be at least 1")]
    ZeroCapacity,
    #[error("threads * queue_factor overflows")]
    TooManyQueues,
}

/// One queue slot: the lock flag, the redundantly cached key of the queue's
/// minimum (readable without the lock), and the buffered queue itself.
/// Entries are padded so neighbors never share a cache line.
#[repr(C)]
struct QueueEntry<S> {
    lock: AtomicBool,
    cached_min: AtomicU64,
    spq: UnsafeCell<BufferedSpq<S>>,
}

// The inner queue is only ever touched while holding `lock`.
unsafe impl<S: Send> Sync for QueueEntry<S> {}

impl<S: SequentialQueue> QueueEntry<S> {
    fn new(buffer_size: usize, spq_capacity: usize) -> Self {
        QueueEntry {
            lock: AtomicBool::new(false),
            cached_min: AtomicU64::new(EMPTY_MIN),
            spq: UnsafeCell::new(BufferedSpq::new(buffer_size, spq_capacity)),
        }
    }
}

/// Exclusive access to one queue entry. Dropping the guard publishes the
/// queue's current minimum to `cached_min` and then releases the lock.
pub struct LockGuard<'a, S: SequentialQueue> {
    entry: &'a QueueEntry<S>,
}

impl<S: SequentialQueue> Deref for LockGuard<'_, S> {
    type Target = BufferedSpq<S>;

    fn deref(&self) -> &BufferedSpq<S> {
        // SAFETY: the guard holds the entry lock, so no other thread
        // accesses the queue.
        unsafe { &*self.entry.spq.get() }
    }
}

impl<S: SequentialQueue> DerefMut for LockGuard<'_, S> {
    fn deref_mut(&mut self) -> &mut BufferedSpq<S> {
        // SAFETY: as above; the lock grants exclusive access.
        unsafe { &mut *self.entry.spq.get() }
    }
}

impl<S: SequentialQueue> Drop for LockGuard<'_, S> {
    fn drop(&mut self) {
        let min = self
            .min_key()
            .map_or(EMPTY_MIN, |k| k as u64);
        debug_assert!(self.entry.lock.load(Ordering::Relaxed), "unlock without hold");
        self.entry.cached_min.store(min, Ordering::Relaxed);
        self.entry.lock.store(false, Ordering::Release);
    }
}

pub struct MultiQueue<S: SequentialQueue> {
    entries: Box<[CachePadded<QueueEntry<S>>]>,
    config: MqConfig,
    epoch: Instant,
}

impl<S: SequentialQueue> MultiQueue<S> {
    pub fn new(config: MqConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let entries = (0..config.num_queues())
            .map(|_| CachePadded::new(QueueEntry::new(config.buffer_size, config.spq_capacity)))
            .collect::<Vec<_>>()
            .into_boxed_slice();
        Ok(MultiQueue {
            entries,
            config,
            epoch: Instant::now(),
        })
    }

    pub fn config(&self) -> &MqConfig {
        &self.config
    }

    pub fn num_queues(&self) -> usize {
        self.entries.len()
    }

    /// Nanoseconds since construction, from a monotonic clock comparable
    /// across the threads of this process.
    pub fn now_nanos(&self) -> u64 {
        self.epoch.elapsed().as_nanos() as u64
    }

    /// Single non-blocking lock attempt on queue `idx`.
    pub fn try_lock(&self, idx: usize) -> Option<LockGuard<'_, S>> {
        let entry: &QueueEntry<S> = &self.entries[idx];
        if entry
            .lock
            .compare_exchange(false, true, Ordering::Acquire, Ordering::Relaxed)
            .is_ok()
        {
            Some(LockGuard { entry })
        } else {
            None
        }
    }

    fn cached_min_raw(&self, idx: usize) -> u64 {
        // Deliberately unordered: a stale value only makes the two-choice
        // comparison slightly inaccurate, never inconsistent.
        self.entries[idx].cached_min.load(Ordering::Relaxed)
    }

    /// Possibly stale key of the minimum of queue `idx`, without locking.
    pub fn cached_min(&self, idx: usize) -> Option<u32> {
        let raw = self.cached_min_raw(idx);
        (raw != EMPTY_MIN).then_some(raw as u32)
    }

    /// Locks queue `idx` and reports whether it is empty; `None` if the
    /// lock was not available.
    pub fn try_probe_empty(&self, idx: usize) -> Option<bool> {
        self.try_lock(idx).map(|guard| guard.is_empty())
    }

    /// Creates the handle for `thread_id`. There must be at most one live
    /// handle per thread id; handles are single-owner and never shared.
    pub fn handle(&self, thread_id: usize) -> ThreadHandle<'_, S> {
        self.make_handle(thread_id, None)
    }

    /// Like [`handle`](Self::handle), with operation logging into a
    /// preallocated buffer of `log_capacity` records.
    pub fn handle_with_log(&self, thread_id: usize, log_capacity: usize) -> ThreadHandle<'_, S> {
        self.make_handle(thread_id, Some(OpLog::with_capacity(log_capacity)))
    }

    fn make_handle(&self, thread_id: usize, log: Option<OpLog>) -> ThreadHandle<'_, S> {
        assert!(
            thread_id < self.config.threads,
            "thread id {thread_id} out of range (threads = {})",
            self.config.threads
        );
        let rng = SmallRng::seed_from_u64(derive_rng_seed(self.config.seed, thread_id as u64));
        ThreadHandle {
            mq: self,
            thread_id,
            rng,
            sticky: [StickySlot {
                index: 0,
                uses: self.config.stickiness,
            }; 3],
            stats: OpStats::default(),
            log,
        }
    }

    /// Removes and returns everything, per queue. Requires exclusive
    /// access, so it can skip the locks entirely.
    pub fn drain_per_queue(&mut self) -> Vec<Vec<Element>> {
        self.entries
            .iter_mut()
            .map(|entry| {
                let entry: &mut QueueEntry<S> = entry;
                let spq = entry.spq.get_mut();
                let mut out = Vec::with_capacity(spq.len());
                while let Some(e) = spq.delete_min() {
                    out.push(e);
                }
                *entry.cached_min.get_mut() = EMPTY_MIN;
                out
            })
            .collect()
    }

    pub fn drain(&mut self) -> Vec<Element> {
        self.drain_per_queue().into_iter().flatten().collect()
    }

    /// With all threads stopped, checks that every cached minimum matches
    /// its queue and that every buffered queue is structurally sound.
    pub fn validate_quiescent(&mut self) -> Result<(), String> {
        for (i, entry) in self.entries.iter_mut().enumerate() {
            let entry: &mut QueueEntry<S> = entry;
            if *entry.lock.get_mut() {
                return Err(format!("queue {i} still locked"));
            }
            let cached = *entry.cached_min.get_mut();
            let spq = entry.spq.get_mut();
            let actual = spq.min_key().map_or(EMPTY_MIN, |k| k as u64);
            if cached != actual {
                return Err(format!(
                    "queue {i}: cached minimum {cached} does not match queue minimum {actual}"
                ));
            }
            spq.validate().map_err(|e| format!("queue {i}: {e}"))?;
        }
        Ok(())
    }
}

/// Derives the seed for an auxiliary generator from the global seed and a
/// stream number (thread id), so runs are replayable.
pub fn derive_rng_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Which sticky slot an operation draws its queue index from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Insert = 0,
    DeleteFirst = 1,
    DeleteSecond = 2,
}

#[derive(Clone, Copy)]
struct StickySlot {
    index: usize,
    uses: usize,
}

/// Operation counters a handle keeps for its thread.
#[derive(Clone, Debug, Default)]
pub struct OpStats {
    pub inserts: u64,
    pub deletes: u64,
    pub failed_deletes: u64,
    /// Total lock attempts across all operations.
    pub lock_attempts: u64,
    /// Largest number of lock attempts any single operation needed.
    pub max_lock_attempts: u64,
}

impl OpStats {
    pub fn ops(&self) -> u64 {
        self.inserts + self.deletes + self.failed_deletes
    }
}

/// Per-thread access point: owns the thread's generator, sticky queue
/// choices, counters and (optionally) the operation log. Not shareable.
pub struct ThreadHandle<'q, S: SequentialQueue> {
    mq: &'q MultiQueue<S>,
    thread_id: usize,
    rng: SmallRng,
    sticky: [StickySlot; 3],
    stats: OpStats,
    log: Option<OpLog>,
}

impl<'q, S: SequentialQueue> ThreadHandle<'q, S> {
    pub fn thread_id(&self) -> usize {
        self.thread_id
    }

    pub fn queue(&self) -> &'q MultiQueue<S> {
        self.mq
    }

    pub fn stats(&self) -> &OpStats {
        &self.stats
    }

    pub fn take_log(&mut self) -> Option<OpLog> {
        self.log.take()
    }

    /// Queue index for the next operation in `role`: the sticky index
    /// while its budget lasts, a fresh uniform draw afterwards. A failed
    /// lock also forces a fresh draw (see the retry loops below).
    pub fn pick_queue(&mut self, role: Role) -> usize {
        let slot = &mut self.sticky[role as usize];
        if slot.uses < self.mq.config.stickiness {
            slot.uses += 1;
            return slot.index;
        }
        self.redraw(role)
    }

    /// Uniform draw that becomes the new sticky index for `role`.
    fn redraw(&mut self, role: Role) -> usize {
        let n = self.mq.num_queues();
        let index = self.rng.random_range(0..n);
        self.sticky[role as usize] = StickySlot { index, uses: 1 };
        index
    }

    pub fn insert(&mut self, e: Element) {
        let mut idx = self.pick_queue(Role::Insert);
        let mut attempts = 1u64;
        let mut guard = loop {
            match self.mq.try_lock(idx) {
                Some(guard) => break guard,
                None => {
                    idx = self.redraw(Role::Insert);
                    attempts += 1;
                }
            }
        };
        // Timestamp inside the critical section: any later deletion of
        // this element takes its own timestamp under the same lock.
        let ts = self.log.is_some().then(|| self.mq.now_nanos());
        guard.insert(e);
        drop(guard);
        self.record_attempts(attempts);
        self.stats.inserts += 1;
        if let Some(log) = &mut self.log {
            log.push(LogRecord {
                timestamp: ts.unwrap(),
                thread: self.thread_id as u32,
                kind: OpKind::Insert,
                key: e.key,
                elem_id: e.value as u64,
            });
        }
    }

    /// Two-choice deletion: inspect the cached minima of two queues, lock
    /// the one that looks smaller, and delete its minimum. Returns `None`
    /// if the locked queue turned out empty; that is not proof that the
    /// whole structure is empty.
    pub fn delete_min(&mut self) -> Option<Element> {
        let mut i = self.pick_queue(Role::DeleteFirst);
        let mut j = self.pick_queue(Role::DeleteSecond);
        let mut attempts = 1u64;
        let mut guard = loop {
            if self.mq.cached_min_raw(i) > self.mq.cached_min_raw(j) {
                std::mem::swap(&mut i, &mut j);
            }
            match self.mq.try_lock(i) {
                Some(guard) => break guard,
                None => {
                    i = self.redraw(Role::DeleteFirst);
                    j = self.redraw(Role::DeleteSecond);
                    attempts += 1;
                }
            }
        };
        let ts = self.log.is_some().then(|| self.mq.now_nanos());
        let out = guard.delete_min();
        drop(guard);
        self.record_attempts(attempts);
        match out {
            Some(e) => {
                self.stats.deletes += 1;
                if let Some(log) = &mut self.log {
                    log.push(LogRecord {
                        timestamp: ts.unwrap(),
                        thread: self.thread_id as u32,
                        kind: OpKind::DeleteSuccess,
                        key: e.key,
                        elem_id: e.value as u64,
                    });
                }
            }
            None => {
                self.stats.failed_deletes += 1;
                if let Some(log) = &mut self.log {
                    log.push(LogRecord {
                        timestamp: ts.unwrap(),
                        thread: self.thread_id as u32,
                        kind: OpKind::DeleteFail,
                        key: 0,
                        elem_id: 0,
                    });
                }
            }
        }
        out
    }

    fn record_attempts(&mut self, attempts: u64) {
        self.stats.lock_attempts += attempts;
        self.stats.max_lock_attempts = self.stats.max_lock_attempts.max(attempts);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spq::DaryHeap;

    fn mq(threads: usize, factor: usize) -> MultiQueue<DaryHeap> {
        let mut cfg = MqConfig::new(threads);
        cfg.queue_factor = factor;
        cfg.spq_capacity = 1024;
        MultiQueue::new(cfg).unwrap()
    }

    #[test]
    fn construction_sizes() {
        assert_eq!(mq(1, 2).num_queues(), 2);
        assert_eq!(mq(4, 2).num_queues(), 8);
    }

    #[test]
    fn invalid_configs_rejected() {
        assert_eq!(
            MultiQueue::<DaryHeap>::new(MqConfig::new(0)).err(),
            Some(ConfigError::ZeroThreads)
        );
        let mut cfg = MqConfig::new(1);
        cfg.queue_factor = 0;
        assert_eq!(
            MultiQueue::<DaryHeap>::new(cfg).err(),
            Some(ConfigError::ZeroFactor)
        );
        let mut cfg = MqConfig::new(1);
        cfg.buffer_size = 0;
        assert_eq!(
            MultiQueue::<DaryHeap>::new(cfg).err(),
            Some(ConfigError::BadBufferSize(0))
        );
        let mut cfg = MqConfig::new(1);
        cfg.buffer_size = 512;
        assert_eq!(
            MultiQueue::<DaryHeap>::new(cfg).err(),
            Some(ConfigError::BadBufferSize(512))
        );
        let mut cfg = MqConfig::new(1);
        cfg.stickiness = 0;
        assert_eq!(
            MultiQueue::<DaryHeap>::new(cfg).err(),
            Some(ConfigError::ZeroStickiness)
        );
    }

    #[test]
    fn empty_queue_fails_delete() {
        let q = mq(1, 2);
        let mut h = q.handle(0);
        assert_eq!(h.delete_min(), None);
        assert_eq!(h.stats().failed_deletes, 1);
    }

    #[test]
    fn single_queue_roundtrip() {
        let q = mq(1, 1);
        let mut h = q.handle(0);
        h.insert(Element::new(5, 1));
        assert_eq!(h.delete_min(), Some(Element::new(5, 1)));
    }

    #[test]
    fn cached_min_follows_locked_updates() {
        let q = mq(1, 1);
        assert_eq!(q.cached_min(0), None);
        {
            let mut guard = q.try_lock(0).unwrap();
            guard.insert(Element::new(3, 0));
            // not yet published
            assert_eq!(q.cached_min(0), None);
        }
        assert_eq!(q.cached_min(0), Some(3));
    }

    #[test]
    fn second_try_lock_fails_while_held() {
        let q = mq(1, 1);
        let guard = q.try_lock(0).unwrap();
        assert!(q.try_lock(0).is_none());
        drop(guard);
        assert!(q.try_lock(0).is_some());
    }

    #[test]
    fn stickiness_one_always_redraws() {
        let q = mq(1, 8);
        let mut h = q.handle(0);
        let picks: Vec<usize> = (0..64).map(|_| h.pick_queue(Role::Insert)).collect();
        // a fixed index 64 times in a row would be astronomically unlikely
        assert!(picks.windows(2).any(|w| w[0] != w[1]));

        // each call consumed exactly one draw from the generator
        let mut rng = SmallRng::seed_from_u64(derive_rng_seed(0, 0));
        let expected: Vec<usize> = (0..64).map(|_| rng.random_range(0..8)).collect();
        assert_eq!(picks, expected);
    }

    #[test]
    fn sticky_index_reused_for_stickiness_period() {
        let q = {
            let mut cfg = MqConfig::new(1);
            cfg.queue_factor = 8;
            cfg.stickiness = 4;
            cfg.spq_capacity = 64;
            MultiQueue::<DaryHeap>::new(cfg).unwrap()
        };
        let mut h = q.handle(0);
        let picks: Vec<usize> = (0..12).map(|_| h.pick_queue(Role::Insert)).collect();
        assert_eq!(picks[0..4].iter().collect::<std::collections::HashSet<_>>().len(), 1);
        assert_eq!(picks[4..8].iter().collect::<std::collections::HashSet<_>>().len(), 1);
        assert_eq!(picks[8..12].iter().collect::<std::collections::HashSet<_>>().len(), 1);
    }

    #[test]
    fn lock_failure_on_sticky_queue_forces_redraw() {
        let q = {
            let mut cfg = MqConfig::new(1);
            cfg.queue_factor = 8;
            cfg.stickiness = 100;
            cfg.spq_capacity = 64;
            MultiQueue::<DaryHeap>::new(cfg).unwrap()
        };
        let mut h = q.handle(0);
        h.insert(Element::new(1, 0));
        let sticky = h.pick_queue(Role::Insert);
        let _blocker = q.try_lock(sticky).unwrap();
        h.insert(Element::new(2, 0));
        // the failed attempt must have moved the sticky slot elsewhere
        let new_sticky = h.pick_queue(Role::Insert);
        assert_ne!(new_sticky, sticky);
        assert!(h.stats().max_lock_attempts >= 2);
    }

    #[test]
    fn same_seed_same_choices() {
        let run = || {
            let q = mq(1, 4);
            let mut h = q.handle(0);
            for k in 0..200u32 {
                h.insert(Element::new(k, k));
            }
            let mut q = q;
            q.drain_per_queue()
                .into_iter()
                .map(|v| v.len())
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn quiescent_validation_after_script() {
        use rand::RngCore;
        let mut q = mq(1, 4);
        {
            let mut h = q.handle(0);
            let mut rng = SmallRng::seed_from_u64(77);
            for _ in 0..5000 {
                if rng.next_u32() % 2 == 0 {
                    h.insert(Element::new(rng.next_u32() % 1000, 0));
                } else {
                    h.delete_min();
                }
            }
        }
        q.validate_quiescent().unwrap();
    }
}
