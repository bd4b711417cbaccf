//! A relaxed concurrent priority queue.
//!
//! The structure keeps `c * p` independent sequential priority queues, each
//! protected by a try-lock and fronted by small insertion/deletion buffers.
//! Insertions target one (sticky or random) queue; deletions look at the
//! cached minima of two queues and take the smaller, which keeps the rank
//! error of deleted elements near-linear in the number of threads. Threads
//! never wait on a held lock: a failed attempt just picks another queue.
//!
//! `deleteMin` is allowed to fail when the queue it locked is empty; this
//! does not prove the whole structure is empty, so applications needing
//! termination detection must handle it themselves.
//!
//! Handles can log every operation with timestamps taken inside the
//! critical section; see the `quality` crate for replaying such logs into
//! exact rank-error and delay measurements.

mod buffer;
mod buffered;
mod element;
mod log;
mod mq;
mod pad;
pub mod spq;

pub use buffer::{DeletionBuffer, InsertionBuffer};
pub use buffered::BufferedSpq;
pub use element::Element;
pub use log::{LogRecord, OpKind, OpLog};
pub use mq::{
    derive_rng_seed, ConfigError, LockGuard, MqConfig, MultiQueue, OpStats, Role, ThreadHandle,
};
pub use pad::CachePadded;
