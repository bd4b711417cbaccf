//! Benchmark harness for the multiqueue: throughput and quality workloads
//! plus a parallel shortest-path benchmark, shared by the `mq-bench`
//! binary and the test suites.

pub mod bench;
pub mod config;
pub mod sssp;
pub mod util;

pub use bench::{prefill, run_quality, run_throughput, QualityOutcome, ThroughputResult};
pub use config::{BenchConfig, HeapKind};
