//! Downstream evaluation: role classification, similarity search,
//! parameter sweeps and runtime scaling.

mod bench;
mod classify;
mod search;
mod sweep;

pub use bench::{bench_graph, bench_runtime, loglog_slope, time_pipeline, write_bench_tsv, BenchConfig, BenchRow, Family};
pub use classify::{classify, ClassifyConfig, EvalReport, Features};
pub use search::{knn_purity, nn_accuracy, topk_search, NeighborList};
pub use sweep::{labeled_features, run_pipeline, sweep, write_sweep_tsv, Metric, PipelineConfig, PipelineRun, SweepParam, SweepRow};
