//! Multi-scale resizing and batch streaming.

mod batch;
mod pingpong;
mod resize;
mod scales;

pub use batch::{band_count, reassemble, stream_batches, BatchStream, PixelBatch, BATCH_ROWS};
pub use pingpong::{
    block_columns, pingpong_stream, pingpong_stream_with, PingPongConfig, StreamTrace, TraceSummary,
};
pub use resize::{resize_bilinear, resize_to};
pub use scales::{generate_scales, target_extent, ScaleSpec, DEFAULT_BASE_SIZES};
