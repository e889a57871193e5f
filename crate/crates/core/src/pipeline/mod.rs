//! End-to-end orchestration: configuration, per-image proposal runs,
//! dataset evaluation and benchmarking.

mod config;
mod dataset;
mod run;
pub mod synth;

pub use config::{PipelineConfig, Scheduler, THREADS_ENV};
pub use dataset::{
    image_path, list_ppm_images, run_bench, run_eval, BenchImage, BenchReport, EvalSummary,
};
pub use run::{proposal_digest, run_pipeline, ImageReport, Pipeline, ScaleReport};
