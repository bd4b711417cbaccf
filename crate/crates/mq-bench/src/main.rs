use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use mq_bench::bench::{run_quality, run_throughput};
use mq_bench::config::{BenchConfig, HeapKind};
use mq_bench::sssp::{load_graph, parallel_sssp, sequential_dijkstra, GraphFormat, SsspConfig};
use mq_bench::util;

#[derive(Parser)]
#[command(name = "mq-bench", version, about = "Multiqueue benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct QueueArgs {
    /// Worker threads p.
    #[arg(long, default_value_t = 4)]
    threads: usize,
    /// Queues per thread c (the structure keeps c*p queues).
    #[arg(long, default_value_t = 4)]
    factor: usize,
    /// Operations a thread sticks to one queue before re-randomizing.
    #[arg(long, default_value_t = 1)]
    stickiness: usize,
    /// Insertion/deletion buffer capacity b.
    #[arg(long, default_value_t = 16)]
    buffer_size: usize,
    /// Sequential queue backing each entry.
    #[arg(long, value_enum, default_value_t = HeapKind::Dary8)]
    heap: HeapKind,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Directory for CSV results and the JSON sidecar.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Do not pin worker threads to hardware threads.
    #[arg(long)]
    no_pin: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Timed 50/50 insert/deleteMin throughput benchmark.
    Throughput {
        #[command(flatten)]
        queue: QueueArgs,
        /// Elements inserted before the measurement.
        #[arg(long, default_value_t = 1_000_000)]
        prefill: usize,
        /// Seconds per run.
        #[arg(long, default_value_t = 3.0)]
        duration: f64,
        /// Runs to average over.
        #[arg(long, default_value_t = 5)]
        runs: usize,
    },
    /// Logged run replayed into exact rank errors and delays.
    Quality {
        #[command(flatten)]
        queue: QueueArgs,
        #[arg(long, default_value_t = 1_000_000)]
        prefill: usize,
        /// deleteMin operations to measure.
        #[arg(long, default_value_t = 1_000_000)]
        ops: u64,
        /// Also write the merged operation log to this file.
        #[arg(long)]
        save_log: Option<PathBuf>,
    },
    /// Parallel single-source shortest paths.
    Sssp {
        #[command(flatten)]
        queue: QueueArgs,
        /// Graph file.
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = GraphFormat::Dimacs)]
        format: GraphFormat,
        /// Source node id (0-based).
        #[arg(long, default_value_t = 0)]
        source: u32,
        /// Cross-check the distances against a sequential run.
        #[arg(long)]
        verify: bool,
    },
}

fn bench_config(queue: &QueueArgs) -> BenchConfig {
    let mut cfg = BenchConfig::new(queue.threads);
    cfg.factor = queue.factor;
    cfg.stickiness = queue.stickiness;
    cfg.buffer_size = queue.buffer_size;
    cfg.heap = queue.heap;
    cfg.seed = queue.seed;
    cfg.pin_threads = !queue.no_pin;
    cfg
}

fn out_writer(dir: &PathBuf, name: &str) -> anyhow::Result<BufWriter<File>> {
    let path = dir.join(name);
    Ok(BufWriter::new(
        File::create(&path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Throughput {
            queue,
            prefill,
            duration,
            runs,
        } => {
            let mut cfg = bench_config(&queue);
            cfg.prefill = prefill;
            cfg.duration_secs = duration;
            cfg.runs = runs;
            let result = run_throughput(&cfg);
            for (i, run) in result.runs.iter().enumerate() {
                println!(
                    "run {i}: {:.2} MOps/s ({} ops in {:.3} s)",
                    run.mops_per_sec, run.total_ops, run.elapsed_secs
                );
            }
            println!("mean: {:.2} MOps/s over {} runs", result.mean_mops(), runs);
            if let Some(dir) = &queue.out {
                fs::create_dir_all(dir)?;
                let mut w = out_writer(dir, "throughput.csv")?;
                writeln!(w, "run,threads,elapsed_s,total_ops,mops_per_s")?;
                for (i, run) in result.runs.iter().enumerate() {
                    writeln!(
                        w,
                        "{i},{},{},{},{}",
                        cfg.threads, run.elapsed_secs, run.total_ops, run.mops_per_sec
                    )?;
                }
                let mut w = out_writer(dir, "thread_ops.csv")?;
                writeln!(w, "run,thread,ops")?;
                for (i, run) in result.runs.iter().enumerate() {
                    for (t, ops) in run.per_thread_ops.iter().enumerate() {
                        writeln!(w, "{i},{t},{ops}")?;
                    }
                }
                util::write_metadata(dir.join("meta.json"), "throughput", &cfg)?;
            }
        }
        Command::Quality {
            queue,
            prefill,
            ops,
            save_log,
        } => {
            let mut cfg = bench_config(&queue);
            cfg.prefill = prefill;
            cfg.delete_target = ops;
            let outcome = run_quality(&cfg).context("replaying the operation log")?;
            let report = &outcome.report;
            println!(
                "{} deletes ({} failed), {} inserts, {:.3} s",
                report.deletes(),
                report.failed_deletes,
                report.inserts,
                outcome.elapsed_secs
            );
            println!(
                "rank error: mean {:.2}, max {}",
                report.mean_rank_error(),
                report.max_rank_error()
            );
            println!(
                "delay:      mean {:.2}, max {}",
                report.mean_delay(),
                report.max_delay()
            );
            if let Some(dir) = &queue.out {
                fs::create_dir_all(dir)?;
                report.write_summary_csv(out_writer(dir, "quality_summary.csv")?)?;
                report.write_rank_error_histogram_csv(out_writer(dir, "rank_error_hist.csv")?)?;
                report.write_delay_histogram_csv(out_writer(dir, "delay_hist.csv")?)?;
                util::write_metadata(dir.join("meta.json"), "quality", &cfg)?;
            }
            if let Some(path) = save_log {
                quality::logfile::write_log_file(&path, &outcome.log)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Sssp {
            queue,
            graph,
            format,
            source,
            verify,
        } => {
            let g = load_graph(&graph, format)
                .with_context(|| format!("loading {}", graph.display()))?;
            println!("{} nodes, {} edges", g.num_nodes(), g.num_edges());
            let mut cfg = SsspConfig::new(queue.threads);
            cfg.factor = queue.factor;
            cfg.stickiness = queue.stickiness;
            cfg.buffer_size = queue.buffer_size;
            cfg.seed = queue.seed;
            let (distances, stats) = parallel_sssp(&g, source, &cfg)?;
            println!(
                "{:.1} ms, processed {} of {} reachable nodes (overhead {:.4})",
                stats.time_ms, stats.processed, stats.reachable, stats.overhead_ratio
            );
            if verify {
                let oracle = sequential_dijkstra(&g, source);
                anyhow::ensure!(distances == oracle, "distances differ from sequential run");
                println!("verified against sequential run");
            }
            if let Some(dir) = &queue.out {
                fs::create_dir_all(dir)?;
                let mut w = out_writer(dir, "sssp.csv")?;
                writeln!(w, "threads,time_ms,processed_nodes,reachable_nodes,overhead_ratio")?;
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    queue.threads, stats.time_ms, stats.processed, stats.reachable,
                    stats.overhead_ratio
                )?;
                util::write_metadata(dir.join("meta.json"), "sssp", &bench_config(&queue))?;
            }
        }
    }
    Ok(())
}
