//! Functional simulation of the two-lane ping-pong batch cache.
//!
//! The image columns are split into four equal vertical blocks (the last block
//! absorbs the remainder columns). Every lane owns a group of block workers; a
//! worker copies one batch of its block per step into its part of the lane.
//! A lane holds one band and only drains once it is completely filled, one
//! batch per step. While one lane drains, the other lane refills, so after the
//! first fill the output never stalls.

use serde::Serialize;

use super::batch::{band_count, PixelBatch};
use crate::imageio::RgbImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PingPongConfig {
    /// Cache lanes; 2 is the ping-pong arrangement, 1 serializes fill and drain.
    pub lanes: usize,
    /// Fetch workers (image blocks) per lane.
    pub workers: usize,
}

impl Default for PingPongConfig {
    fn default() -> Self {
        Self {
            lanes: 2,
            workers: 4,
        }
    }
}

/// Emission log of a scheduler run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StreamTrace {
    /// `(lane, batch index)` for every emitted batch, in emission order.
    pub emissions: Vec<(u8, usize)>,
    /// Steps after the first emission in which no batch left the cache.
    pub gap_count: usize,
    /// Steps before the first emission.
    pub warmup_steps: usize,
    pub total_steps: usize,
    /// Batches per band.
    pub band_width: usize,
}

impl StreamTrace {
    /// Lane id of every drained group (band), in order.
    pub fn group_lanes(&self) -> Vec<u8> {
        self.emissions
            .iter()
            .filter(|&&(_, idx)| idx % self.band_width.max(1) == 0)
            .map(|&(lane, _)| lane)
            .collect()
    }

    pub fn summary(&self, cfg: &PingPongConfig, bands: usize) -> TraceSummary {
        TraceSummary {
            lanes: cfg.lanes,
            workers: cfg.workers,
            batches: self.emissions.len(),
            groups: bands,
            warmup_steps: self.warmup_steps,
            total_steps: self.total_steps,
            gap_count: self.gap_count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TraceSummary {
    pub lanes: usize,
    pub workers: usize,
    pub batches: usize,
    pub groups: usize,
    pub warmup_steps: usize,
    pub total_steps: usize,
    pub gap_count: usize,
}

/// Column range `[start, end)` of each worker's block.
pub fn block_columns(width: usize, workers: usize) -> Vec<(usize, usize)> {
    let step = width / workers;
    (0..workers)
        .map(|k| {
            let end = if k + 1 == workers {
                width
            } else {
                (k + 1) * step
            };
            (k * step, end)
        })
        .collect()
}

struct Lane {
    band: Option<usize>,
    slots: Vec<Option<PixelBatch>>,
    fetched: Vec<usize>,
    drained: usize,
}

impl Lane {
    fn new(width: usize, workers: usize) -> Self {
        Lane {
            band: None,
            slots: vec![None; width],
            fetched: vec![0; workers],
            drained: 0,
        }
    }

    fn is_full(&self, blocks: &[(usize, usize)]) -> bool {
        blocks
            .iter()
            .zip(&self.fetched)
            .all(|(&(s, e), &n)| n == e - s)
    }
}

pub fn pingpong_stream(img: &RgbImage) -> (Vec<PixelBatch>, StreamTrace) {
    pingpong_stream_with(img, PingPongConfig::default())
}

pub fn pingpong_stream_with(img: &RgbImage, cfg: PingPongConfig) -> (Vec<PixelBatch>, StreamTrace) {
    assert!(
        cfg.lanes >= 1 && cfg.workers >= 1,
        "scheduler needs at least one lane and worker"
    );
    let width = img.width();
    let bands = band_count(img.height());
    let blocks = block_columns(width, cfg.workers);
    let mut lanes: Vec<Lane> = (0..cfg.lanes)
        .map(|_| Lane::new(width, cfg.workers))
        .collect();

    let mut out = Vec::with_capacity(bands * width);
    let mut trace = StreamTrace {
        band_width: width,
        ..StreamTrace::default()
    };
    let mut next_fill = 0usize;
    let mut next_drain = 0usize;
    let mut step = 0usize;

    while next_drain < bands {
        // free lanes pick up the next band in lane rotation
        for lane in &mut lanes {
            if lane.band.is_none() && next_fill < bands {
                lane.band = Some(next_fill);
                lane.fetched.iter_mut().for_each(|n| *n = 0);
                lane.drained = 0;
                next_fill += 1;
            }
        }

        // drain: the lane holding the oldest band emits one batch once it is full
        let mut emitted = false;
        let drain_lane = next_drain % cfg.lanes;
        let lane = &mut lanes[drain_lane];
        if lane.band == Some(next_drain) && lane.is_full(&blocks) {
            let batch = lane.slots[lane.drained].take().expect("filled slot");
            trace.emissions.push((drain_lane as u8, out.len()));
            out.push(batch);
            lane.drained += 1;
            emitted = true;
            if lane.drained == width {
                lane.band = None;
                next_drain += 1;
            }
        }

        // fill: every worker of every filling lane copies one batch of its block
        for lane in &mut lanes {
            let Some(band) = lane.band else { continue };
            if lane.drained > 0 {
                continue;
            }
            for (k, &(start, end)) in blocks.iter().enumerate() {
                let n = lane.fetched[k];
                if start + n < end {
                    lane.slots[start + n] = Some(PixelBatch::fetch(img, start + n, band));
                    lane.fetched[k] += 1;
                }
            }
        }

        if trace.emissions.is_empty() {
            trace.warmup_steps += 1;
        } else if !emitted && next_drain < bands {
            trace.gap_count += 1;
        }
        step += 1;
    }
    trace.total_steps = step;
    (out, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaler::stream_batches;

    fn noise(w: usize, h: usize, seed: u32) -> RgbImage {
        let mut s = seed;
        RgbImage::from_fn(w, h, |_, _| {
            s ^= s << 13;
            s ^= s >> 17;
            s ^= s << 5;
            let b = s.to_le_bytes();
            [b[0], b[1], b[2]]
        })
    }

    #[test]
    fn blocks_cover_width() {
        assert_eq!(block_columns(10, 4), [(0, 2), (2, 4), (4, 6), (6, 10)]);
        assert_eq!(block_columns(3, 4), [(0, 0), (0, 0), (0, 0), (0, 3)]);
    }

    #[test]
    fn matches_plain_stream() {
        let img = noise(16, 16, 7);
        let (batches, _) = pingpong_stream(&img);
        let plain: Vec<_> = stream_batches(&img).collect();
        assert_eq!(batches, plain);
    }

    #[test]
    fn lanes_alternate() {
        let img = noise(16, 16, 3);
        let (_, trace) = pingpong_stream(&img);
        assert_eq!(trace.group_lanes(), [0, 1, 0, 1]);
    }

    #[test]
    fn no_gaps_after_warmup() {
        let img = noise(64, 64, 11);
        let (_, trace) = pingpong_stream(&img);
        assert_eq!(trace.gap_count, 0);
        // the first lane fill takes as long as the widest block
        assert_eq!(trace.warmup_steps, 16);
        assert_eq!(trace.total_steps, trace.warmup_steps + 64 * 16);
    }

    #[test]
    fn single_lane_stalls_between_bands() {
        let img = noise(64, 64, 5);
        let cfg = PingPongConfig {
            lanes: 1,
            workers: 4,
        };
        let (batches, trace) = pingpong_stream_with(&img, cfg);
        assert_eq!(batches, stream_batches(&img).collect::<Vec<_>>());
        // each of the 15 later bands waits for a 16-step refill
        assert_eq!(trace.gap_count, 15 * 16);
        assert_eq!(trace.group_lanes(), vec![0; 16]);
    }
}
