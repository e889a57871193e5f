//! Synthetic fixtures: images with one planted high-contrast square and a
//! hand-made center-surround window model that responds to square outlines.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::imageio::{GroundTruth, GtObject, RgbImage, SvmModel, FEATURE_LEN, WINDOW};
use crate::selector::BoundingBox;

pub const SQUARE_CLASS: &str = "square";

#[derive(Debug, Clone)]
pub struct PlantedSquare {
    pub image: RgbImage,
    pub bbox: BoundingBox,
}

/// Dark, mildly noisy background with one bright square of side in `side`.
pub fn planted_square(
    rng: &mut impl Rng,
    width: usize,
    height: usize,
    side: (usize, usize),
) -> PlantedSquare {
    let max_side = side.1.min(width).min(height);
    let s = rng.gen_range(side.0.min(max_side)..=max_side);
    let x0 = rng.gen_range(0..=width - s);
    let y0 = rng.gen_range(0..=height - s);
    let bg: [u8; 3] = std::array::from_fn(|_| rng.gen_range(30..=70));
    let fg: [u8; 3] = std::array::from_fn(|_| rng.gen_range(190..=250));
    let image = RgbImage::from_fn(width, height, |x, y| {
        let inside = (x0..x0 + s).contains(&x) && (y0..y0 + s).contains(&y);
        let base = if inside { fg } else { bg };
        let noise = rng.gen_range(0..=4u8);
        base.map(|c| c.saturating_add(noise))
    });
    PlantedSquare {
        image,
        bbox: BoundingBox::new(
            x0 as u32,
            y0 as u32,
            (x0 + s - 1) as u32,
            (y0 + s - 1) as u32,
        ),
    }
}

/// `count` images named `img_000`, `img_001`, ... from a fixed seed.
pub fn planted_square_dataset(
    seed: u64,
    count: usize,
    width: usize,
    height: usize,
    side: (usize, usize),
) -> Vec<(String, PlantedSquare)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            (
                format!("img_{i:03}"),
                planted_square(&mut rng, width, height, side),
            )
        })
        .collect()
}

pub fn ground_truth(dataset: &[(String, PlantedSquare)]) -> Vec<GroundTruth> {
    dataset
        .iter()
        .map(|(id, sq)| GroundTruth {
            image_id: id.clone(),
            objects: vec![GtObject {
                class_label: SQUARE_CLASS.into(),
                bbox: sq.bbox,
            }],
        })
        .collect()
}

/// +1 on the window border, -1 on the inner 4x4 core, 0 in between.
pub fn center_surround_model() -> SvmModel {
    let mut w = [0i32; FEATURE_LEN];
    for r in 0..WINDOW {
        for c in 0..WINDOW {
            let ring = r.min(c).min(WINDOW - 1 - r).min(WINDOW - 1 - c);
            w[r * WINDOW + c] = match ring {
                0 => 1,
                1 => 0,
                _ => -1,
            };
        }
    }
    SvmModel::from_integer_weights(w)
}
