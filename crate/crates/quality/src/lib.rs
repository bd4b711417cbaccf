//! Exact post-hoc quality measurement for relaxed priority queues.
//!
//! Threads log their operations locally with timestamps taken inside the
//! queue's critical sections; afterwards the logs are merged into one
//! global sequence and replayed against an order-statistic tree with lazy
//! delay counters. That yields, for every deletion, the exact number of
//! live elements that were smaller (the rank error), and for every
//! element, how often it was overtaken by a larger one (its delay).
//!
//! [`theory`] provides the matching closed-form predictions.

pub mod logfile;
mod replay;
mod report;
pub mod stat_tree;
pub mod theory;

pub use multiqueue::{LogRecord, OpKind};
pub use replay::{merge_logs, replay, ReplayError};
pub use report::{histogram, QualityReport};
pub use stat_tree::StatTree;
