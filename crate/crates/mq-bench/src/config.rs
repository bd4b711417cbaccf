use clap::ValueEnum;
use multiqueue::MqConfig;
use serde::Serialize;

/// Which sequential queue backs each entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HeapKind {
    /// 8-ary implicit heap.
    Dary8,
    /// Binary heap over sorted runs of 16 elements.
    Merging16,
}

/// Shared benchmark configuration. Not every field applies to every
/// benchmark: `duration_secs`/`runs` drive the throughput workload,
/// `delete_target` the quality workload.
#[derive(Clone, Debug, Serialize)]
pub struct BenchConfig {
    pub threads: usize,
    pub factor: usize,
    pub stickiness: usize,
    pub buffer_size: usize,
    pub heap: HeapKind,
    /// Elements inserted before the measurement starts.
    pub prefill: usize,
    pub seed: u64,
    /// Wall-clock seconds per throughput run.
    pub duration_secs: f64,
    /// Throughput runs to average over.
    pub runs: usize,
    /// deleteMin operations to measure in a quality run.
    pub delete_target: u64,
    pub pin_threads: bool,
}

impl BenchConfig {
    pub fn new(threads: usize) -> Self {
        BenchConfig {
            threads,
            factor: 4,
            stickiness: 1,
            buffer_size: 16,
            heap: HeapKind::Dary8,
            prefill: 1_000_000,
            seed: 1,
            duration_secs: 3.0,
            runs: 5,
            delete_target: 1_000_000,
            pin_threads: true,
        }
    }

    pub fn mq_config(&self) -> MqConfig {
        let mut cfg = MqConfig::new(self.threads);
        cfg.queue_factor = self.factor;
        cfg.buffer_size = self.buffer_size;
        cfg.stickiness = self.stickiness;
        cfg.seed = self.seed;
        cfg
    }
}
