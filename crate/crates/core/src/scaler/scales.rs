use crate::error::{Error, Result};
use crate::imageio::WINDOW;

/// One resize target: an 8x8 window in the resized image stands for a
/// `base_w` x `base_h` region of the original.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct ScaleSpec {
    pub scale_id: u32,
    pub base_w: usize,
    pub base_h: usize,
    pub target_w: usize,
    pub target_h: usize,
}

pub const DEFAULT_BASE_SIZES: [usize; 5] = [16, 32, 64, 128, 256];

/// `max(8, round(orig * 8 / base))` with round-half-up in exact integer arithmetic.
pub fn target_extent(orig: usize, base: usize) -> usize {
    let scaled = (2 * orig * WINDOW + base) / (2 * base);
    scaled.max(WINDOW)
}

/// Crosses the base sizes with themselves; ids are dense in `(base_w, base_h)` order.
///
/// Duplicate base sizes are collapsed.
pub fn generate_scales(
    orig_w: usize,
    orig_h: usize,
    base_sizes: &[usize],
) -> Result<Vec<ScaleSpec>> {
    if base_sizes.is_empty() {
        return Err(Error::InvalidArgument(
            "base_sizes must not be empty".into(),
        ));
    }
    if let Some(&b) = base_sizes.iter().find(|&&b| b < WINDOW) {
        return Err(Error::InvalidArgument(format!(
            "base size {b} is smaller than the {WINDOW}-pixel window"
        )));
    }
    if orig_w < WINDOW || orig_h < WINDOW {
        return Err(Error::InvalidArgument(format!(
            "image {orig_w}x{orig_h} is smaller than the {WINDOW}x{WINDOW} window"
        )));
    }
    let mut sizes = base_sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let mut specs = Vec::with_capacity(sizes.len() * sizes.len());
    for &base_w in &sizes {
        for &base_h in &sizes {
            specs.push(ScaleSpec {
                scale_id: specs.len() as u32,
                base_w,
                base_h,
                target_w: target_extent(orig_w, base_w),
                target_h: target_extent(orig_h, base_h),
            });
        }
    }
    Ok(specs)
}
