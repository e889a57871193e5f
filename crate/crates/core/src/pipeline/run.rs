use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{PipelineConfig, Scheduler};
use crate::error::{Error, Result};
use crate::imageio::{format_proposals, RgbImage, SvmModel};
use crate::kernel::{
    run_kernel, run_kernel_pipelined, Candidate, KernelStats, DEFAULT_FIFO_CAPACITY,
};
use crate::scaler::{
    band_count, generate_scales, pingpong_stream, resize_bilinear, stream_batches, PingPongConfig,
    PixelBatch, ScaleSpec, TraceSummary,
};
use crate::selector::{stage2_calibrate, topn_per_scale, window_to_bbox, Proposal, ProposalHeap};

#[derive(Debug, Clone, Serialize)]
pub struct ScaleReport {
    pub spec: ScaleSpec,
    /// NMS survivors before top-n.
    pub candidates: usize,
    /// Candidates kept by top-n.
    pub selected: usize,
    pub kernel: KernelStats,
    pub trace: Option<TraceSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImageReport {
    pub width: usize,
    pub height: usize,
    pub seconds: f64,
    pub proposals: usize,
    pub heap_max_sift_depth: usize,
    pub scales: Vec<ScaleReport>,
}

impl ImageReport {
    /// Total SVM window scores computed across scales.
    pub fn svm_items(&self) -> u64 {
        self.scales.iter().map(|s| s.kernel.svm.items_out).sum()
    }
}

/// Hex SHA-256 of the proposal CSV text.
pub fn proposal_digest(proposals: &[Proposal]) -> String {
    hex::encode(Sha256::digest(format_proposals(proposals).as_bytes()))
}

/// A configured proposal generator: resize, kernel and top-n per scale,
/// then calibration and a global top-k.
pub struct Pipeline {
    cfg: PipelineConfig,
    model: SvmModel,
    pool: rayon::ThreadPool,
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig, model: SvmModel) -> Result<Self> {
        cfg.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        Ok(Self { cfg, model, pool })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn model(&self) -> &SvmModel {
        &self.model
    }

    fn run_scale(&self, img: &RgbImage, spec: &ScaleSpec) -> Result<(Vec<Candidate>, ScaleReport)> {
        let resized = resize_bilinear(img, spec);
        let (w, h) = (resized.width(), resized.height());
        let (batches, trace): (Box<dyn Iterator<Item = PixelBatch> + Send + '_>, _) =
            match self.cfg.scheduler {
                Scheduler::Plain => (Box::new(stream_batches(&resized)), None),
                Scheduler::Pingpong => {
                    let (batches, trace) = pingpong_stream(&resized);
                    let summary = trace.summary(&PingPongConfig::default(), band_count(h));
                    (Box::new(batches.into_iter()), Some(summary))
                }
            };
        let (candidates, stats) = if self.cfg.pipelined_stages {
            run_kernel_pipelined(
                batches,
                w,
                h,
                &self.model,
                spec.scale_id,
                DEFAULT_FIFO_CAPACITY,
            )?
        } else {
            run_kernel(batches, w, h, &self.model, spec.scale_id)?
        };
        let found = candidates.len();
        let top = topn_per_scale(candidates, self.cfg.top_n_per_scale)?;
        let report = ScaleReport {
            spec: *spec,
            candidates: found,
            selected: top.len(),
            kernel: stats,
            trace,
        };
        Ok((top, report))
    }

    pub fn run(&self, img: &RgbImage) -> Result<(Vec<Proposal>, ImageReport)> {
        let start = Instant::now();
        let (w, h) = (img.width(), img.height());
        let specs = generate_scales(w, h, &self.cfg.base_sizes)?;
        let per_scale: Vec<(Vec<Candidate>, ScaleReport)> = self.pool.install(|| {
            specs
                .par_iter()
                .map(|s| self.run_scale(img, s))
                .collect::<Result<_>>()
        })?;

        // merged in scale_id order regardless of which worker finished first
        let mut heap = ProposalHeap::new(self.cfg.top_k);
        for ((top, _), spec) in per_scale.iter().zip(&specs) {
            for c in top {
                heap.push(Proposal {
                    bbox: window_to_bbox(c, spec, w, h),
                    score: stage2_calibrate(c, &self.model),
                    scale_id: c.scale_id,
                });
            }
        }
        let max_sift = heap.max_sift_depth();
        let proposals = heap.finalize();
        let report = ImageReport {
            width: w,
            height: h,
            seconds: start.elapsed().as_secs_f64(),
            proposals: proposals.len(),
            heap_max_sift_depth: max_sift,
            scales: per_scale.into_iter().map(|(_, r)| r).collect(),
        };
        Ok((proposals, report))
    }
}

pub fn run_pipeline(
    img: &RgbImage,
    cfg: &PipelineConfig,
    model: &SvmModel,
) -> Result<(Vec<Proposal>, ImageReport)> {
    Pipeline::new(cfg.clone(), model.clone())?.run(img)
}
