//! Per-scale top-n, stage-II calibration, box mapping and global top-k.

mod bbox;
mod heap;

pub use bbox::{window_to_bbox, BoundingBox};
pub use heap::TopKHeap;

use ordered_float::OrderedFloat;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::imageio::SvmModel;
use crate::kernel::{Candidate, Score};

pub const DEFAULT_TOP_N: usize = 150;
pub const DEFAULT_TOP_K: usize = 1000;

/// A calibrated proposal in original-image coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proposal {
    pub bbox: BoundingBox,
    pub score: f64,
    pub scale_id: u32,
}

/// The `n` best candidates of one scale, strongest first, ties by arrival.
pub fn topn_per_scale(
    candidates: impl IntoIterator<Item = Candidate>,
    n: usize,
) -> Result<Vec<Candidate>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "top-n budget must be positive".into(),
        ));
    }
    let mut heap: TopKHeap<Score, Candidate> = TopKHeap::new(n);
    let mut scale = None;
    for c in candidates {
        if *scale.get_or_insert(c.scale_id) != c.scale_id {
            return Err(Error::InvalidArgument(format!(
                "top-n input mixes scales {} and {}",
                scale.unwrap(),
                c.scale_id
            )));
        }
        heap.push(c.score, c);
    }
    Ok(heap.finalize().into_iter().map(|(_, c)| c).collect())
}

pub fn stage2_calibrate(cand: &Candidate, model: &SvmModel) -> f64 {
    model.calibration(cand.scale_id).apply(cand.score.to_f64())
}

/// Global top-k over calibrated proposals.
pub struct ProposalHeap {
    heap: TopKHeap<OrderedFloat<f64>, Proposal>,
}

impl ProposalHeap {
    pub fn new(k: usize) -> Self {
        Self {
            heap: TopKHeap::new(k),
        }
    }

    pub fn push(&mut self, p: Proposal) -> bool {
        debug_assert!(p.score.is_finite());
        self.heap.push(OrderedFloat(p.score), p)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn max_sift_depth(&self) -> usize {
        self.heap.max_sift_depth()
    }

    pub fn finalize(&mut self) -> Vec<Proposal> {
        self.heap.finalize().into_iter().map(|(_, p)| p).collect()
    }
}
