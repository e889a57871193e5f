use serde::Serialize;

use crate::imageio::WINDOW;
use crate::kernel::Candidate;
use crate::scaler::ScaleSpec;

/// Box with inclusive pixel corners; area is `(x1 - x0 + 1) * (y1 - y0 + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BoundingBox {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl BoundingBox {
    pub fn new(x0: u32, y0: u32, x1: u32, y1: u32) -> Self {
        assert!(x1 >= x0 && y1 >= y0, "inverted box ({x0},{y0},{x1},{y1})");
        Self { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> u64 {
        u64::from(self.x1 - self.x0) + 1
    }

    pub fn height(&self) -> u64 {
        u64::from(self.y1 - self.y0) + 1
    }

    pub fn area(&self) -> u64 {
        self.width() * self.height()
    }

    /// Overlap area; zero when disjoint.
    pub fn intersection_area(&self, other: &BoundingBox) -> u64 {
        let x0 = self.x0.max(other.x0);
        let y0 = self.y0.max(other.y0);
        let x1 = self.x1.min(other.x1);
        let y1 = self.y1.min(other.y1);
        if x1 < x0 || y1 < y0 {
            return 0;
        }
        (u64::from(x1 - x0) + 1) * (u64::from(y1 - y0) + 1)
    }
}

// round(num / den), halves up
fn ratio_round(num: usize, den: usize) -> usize {
    (2 * num + den) / (2 * den)
}

/// Maps a window anchor in a resized image back to original-image pixels.
pub fn window_to_bbox(
    cand: &Candidate,
    spec: &ScaleSpec,
    orig_w: usize,
    orig_h: usize,
) -> BoundingBox {
    let axis = |anchor: usize, orig: usize, target: usize| {
        let lo = ratio_round(anchor * orig, target).min(orig - 1);
        let hi = ratio_round((anchor + WINDOW) * orig, target)
            .saturating_sub(1)
            .clamp(lo, orig - 1);
        (lo as u32, hi as u32)
    };
    let (x0, x1) = axis(cand.x, orig_w, spec.target_w);
    let (y0, y1) = axis(cand.y, orig_h, spec.target_h);
    BoundingBox { x0, y0, x1, y1 }
}
