//! Streaming objectness region proposals.
//!
//! An image is resized to a set of scales, each resized image is streamed as
//! 4-pixel vertical batches through a line-buffered gradient / SVM / NMS
//! kernel, and the survivors are reduced by per-scale top-n, calibrated, and
//! merged by a bounded top-k heap. Dense reference implementations of every
//! kernel stage and a VOC-style evaluator (DR / MABO vs #WIN) live alongside.

pub mod error;
pub mod eval;
pub mod imageio;
pub mod kernel;
pub mod pipeline;
pub mod scaler;
pub mod selector;

pub use error::{Error, Result};
pub use eval::{detection_rate, iou, mabo, CurvePoint, ProposalSet};
pub use imageio::{GroundTruth, RgbImage, SvmModel};
pub use kernel::{Candidate, Score};
pub use pipeline::{run_pipeline, Pipeline, PipelineConfig, Scheduler};
pub use scaler::{PixelBatch, ScaleSpec};
pub use selector::{BoundingBox, Proposal, TopKHeap};
