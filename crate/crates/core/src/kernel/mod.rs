//! Normed gradients, SVM-I window scoring and 5x5 NMS, as dense references
//! and as a streaming stage chain over pixel batches.

mod buffers;
mod dense;
mod stages;
mod stream;
mod types;

pub use buffers::{LineBuffer, MemoryWindow};
pub use dense::{
    calc_gradients_dense, kernel_dense, nms_select_dense, rgb_distance, svm_score_dense, NMS_TILE,
};
pub use stages::{
    GradientStage, NmsStage, Stage, StageStats, SvmStage, GRADIENT_LINE_ROWS, NMS_LINE_ROWS,
    SVM_LINE_ROWS,
};
pub use stream::{
    kernel_stream, run_kernel, run_kernel_pipelined, KernelStats, KernelStream,
    DEFAULT_FIFO_CAPACITY,
};
pub use types::{Candidate, Column, GradientMap, Score, ScoreMap};
