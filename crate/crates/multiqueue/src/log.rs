//! Per-thread operation logging for post-hoc quality analysis.
//!
//! Records are produced inside the queue's critical sections, so a
//! deletion's timestamp is always ordered after the timestamp of the
//! matching insertion. Logging is strictly thread-local; merging the
//! per-thread logs into one global sequence happens after the run.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpKind {
    Insert,
    DeleteSuccess,
    /// A deleteMin that found no element. This does not prove the queue
    /// was globally empty.
    DeleteFail,
}

/// One logged operation. `elem_id` identifies the element across its
/// insert and delete records; the queue uses the element's value payload,
/// so workloads that want exact replay must keep payloads unique among
/// live elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LogRecord {
    /// Nanoseconds since the owning queue was constructed, read from a
    /// monotonic clock shared by all threads of the process.
    pub timestamp: u64,
    pub thread: u32,
    pub kind: OpKind,
    /// Element key; 0 for failed deletions.
    pub key: u32,
    /// Element identity; 0 for failed deletions.
    pub elem_id: u64,
}

/// Preallocated append-only log. Growing mid-run would perturb the
/// measurement, so exceeding the capacity aborts instead.
#[derive(Debug)]
pub struct OpLog {
    records: Vec<LogRecord>,
    capacity: usize,
}

impl OpLog {
    pub fn with_capacity(capacity: usize) -> Self {
        OpLog {
            records: Vec::with_capacity(capacity),
            capacity,
        }
    }

    pub fn push(&mut self, record: LogRecord) {
        if self.records.len() == self.capacity {
            panic!(
                "operation log full ({} records); configure a larger log capacity for this run",
                self.capacity
            );
        }
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[LogRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<LogRecord> {
        self.records
    }
}
