//! Sequential priority queues used as the main queue behind the buffers.

mod dary;
mod merging;

pub use dary::DaryHeap;
pub use merging::{merge_split, MergingHeap};

use crate::Element;

/// Minimum interface a sequential queue must provide to back a buffered
/// queue. Implementations are single-threaded; all synchronization is the
/// caller's problem.
pub trait SequentialQueue {
    /// Creates an empty queue with `capacity` elements preallocated so that
    /// later insertions rarely reallocate.
    fn with_capacity(capacity: usize) -> Self;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn insert(&mut self, e: Element);

    /// Removes and returns an element with the smallest key, or `None` if
    /// the queue is empty. Ties are broken arbitrarily.
    fn delete_min(&mut self) -> Option<Element>;

    /// Equivalent to inserting every batch element individually.
    fn bulk_insert(&mut self, batch: &[Element]);

    /// Removes the `k` smallest elements (fewer if the queue holds less)
    /// and appends them to `out` in ascending key order.
    fn extract_min(&mut self, k: usize, out: &mut Vec<Element>);

    /// Appends all live elements to `out` in unspecified order.
    fn collect_elements(&self, out: &mut Vec<Element>);
}
