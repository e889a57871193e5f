//! Whole-image reference implementations of the kernel stages.

use super::types::{Candidate, GradientMap, Score, ScoreMap};
use crate::error::{Error, Result};
use crate::imageio::{RgbImage, SvmModel, WINDOW};

/// NMS tile edge.
pub const NMS_TILE: usize = 5;

/// Largest per-channel absolute difference (Chebyshev distance in RGB).
#[inline]
pub fn rgb_distance(a: [u8; 3], b: [u8; 3]) -> u8 {
    a.iter()
        .zip(&b)
        .map(|(&p, &q)| p.abs_diff(q))
        .max()
        .unwrap_or(0)
}

/// `G = min(D(left, right) + D(up, down), 255)` with borders clamped.
#[inline]
pub(crate) fn saturated_gradient(left: [u8; 3], right: [u8; 3], up: [u8; 3], down: [u8; 3]) -> u8 {
    let sum = u16::from(rgb_distance(left, right)) + u16::from(rgb_distance(up, down));
    sum.min(255) as u8
}

pub fn calc_gradients_dense(img: &RgbImage) -> GradientMap {
    let (w, h) = (img.width(), img.height());
    let mut g = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            g.push(saturated_gradient(
                img.pixel(x.saturating_sub(1), y),
                img.pixel((x + 1).min(w - 1), y),
                img.pixel(x, y.saturating_sub(1)),
                img.pixel(x, (y + 1).min(h - 1)),
            ));
        }
    }
    GradientMap {
        width: w,
        height: h,
        g,
    }
}

pub fn svm_score_dense(grad: &GradientMap, model: &SvmModel) -> Result<ScoreMap> {
    if grad.width < WINDOW || grad.height < WINDOW {
        return Err(Error::InvalidArgument(format!(
            "gradient map {}x{} is smaller than the {WINDOW}x{WINDOW} window",
            grad.width, grad.height
        )));
    }
    let w = model.raw_weights();
    let (win_w, win_h) = (grad.width - WINDOW + 1, grad.height - WINDOW + 1);
    let mut s = Vec::with_capacity(win_w * win_h);
    for y in 0..win_h {
        for x in 0..win_w {
            let mut acc = 0i64;
            for r in 0..WINDOW {
                let row = &grad.g[(y + r) * grad.width + x..][..WINDOW];
                for (c, &g) in row.iter().enumerate() {
                    acc += i64::from(g) * w[r * WINDOW + c];
                }
            }
            s.push(Score(acc));
        }
    }
    Ok(ScoreMap::new(win_w, win_h, s))
}

/// One candidate per non-overlapping 5x5 tile anchored at the origin.
///
/// Each tile takes the maximum of every row first, then the maximum of those;
/// ties go to the smallest `(y, x)`. Output is tile-row-major.
pub fn nms_select_dense(scores: &ScoreMap, scale_id: u32) -> Vec<Candidate> {
    let mut out =
        Vec::with_capacity(scores.win_w.div_ceil(NMS_TILE) * scores.win_h.div_ceil(NMS_TILE));
    for ty in (0..scores.win_h).step_by(NMS_TILE) {
        for tx in (0..scores.win_w).step_by(NMS_TILE) {
            let mut best: Option<Candidate> = None;
            for y in ty..(ty + NMS_TILE).min(scores.win_h) {
                let mut row_best = (scores.get(tx, y), tx);
                for x in tx + 1..(tx + NMS_TILE).min(scores.win_w) {
                    if scores.get(x, y) > row_best.0 {
                        row_best = (scores.get(x, y), x);
                    }
                }
                if best.is_none_or(|b| row_best.0 > b.score) {
                    best = Some(Candidate {
                        scale_id,
                        x: row_best.1,
                        y,
                        score: row_best.0,
                    });
                }
            }
            out.extend(best);
        }
    }
    out
}

/// Dense composition of all three stages on one resized image.
pub fn kernel_dense(img: &RgbImage, model: &SvmModel, scale_id: u32) -> Result<Vec<Candidate>> {
    let scores = svm_score_dense(&calc_gradients_dense(img), model)?;
    Ok(nms_select_dense(&scores, scale_id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const WHITE: [u8; 3] = [255; 3];
    const BLACK: [u8; 3] = [0; 3];

    #[test]
    fn distance_examples() {
        assert_eq!(rgb_distance([9, 8, 7], [9, 8, 7]), 0);
        assert_eq!(rgb_distance([10, 20, 30], [40, 5, 30]), 30);
        assert_eq!(rgb_distance(BLACK, WHITE), 255);
    }

    #[test]
    fn constant_image_has_no_gradient() {
        let g = calc_gradients_dense(&RgbImage::filled(9, 7, [40, 50, 60]));
        assert!(g.g.iter().all(|&v| v == 0));
    }

    #[test]
    fn gradient_saturates() {
        // Ix = 200 (left/right), Iy = 100 (up/down) at the center pixel
        let mut img = RgbImage::filled(3, 3, BLACK);
        img.set_pixel(2, 1, [200, 0, 0]);
        img.set_pixel(1, 2, [0, 100, 0]);
        assert_eq!(calc_gradients_dense(&img).get(1, 1), 255);
        assert_eq!(saturated_gradient(BLACK, [200; 3], BLACK, [100; 3]), 255);
        assert_eq!(saturated_gradient(BLACK, [100; 3], BLACK, [100; 3]), 200);
    }

    #[test]
    fn black_center_column_fixture() {
        // white | black | white: the center pixel sees white on both sides, the
        // clamped border pixels see white against black
        let img = RgbImage::from_fn(3, 3, |x, _| if x == 1 { BLACK } else { WHITE });
        let g = calc_gradients_dense(&img);
        assert_eq!(&g.g[3..6], &[255, 0, 255]);
        // with the black column on the left edge the interior pixel straddles the edge
        let img = RgbImage::from_fn(3, 3, |x, _| if x == 0 { BLACK } else { WHITE });
        assert_eq!(calc_gradients_dense(&img).get(1, 1), 255);
    }

    #[test]
    fn svm_examples() {
        let zero = GradientMap {
            width: 10,
            height: 9,
            g: vec![0; 90],
        };
        let ones = SvmModel::from_integer_weights([1; 64]);
        let s = svm_score_dense(&zero, &ones).unwrap();
        assert_eq!((s.win_w, s.win_h), (3, 2));
        assert!(s.s.iter().all(|&v| v == Score(0)));

        let twos = GradientMap {
            width: 8,
            height: 8,
            g: vec![2; 64],
        };
        let s = svm_score_dense(&twos, &ones).unwrap();
        assert_eq!(s.s, vec![Score(128 << 16)]);
        assert_eq!(s.s[0].to_f64(), 128.0);

        let small = GradientMap {
            width: 7,
            height: 9,
            g: vec![0; 63],
        };
        assert!(svm_score_dense(&small, &ones).is_err());
    }

    fn grid(w: usize, h: usize, f: impl Fn(usize, usize) -> i64) -> ScoreMap {
        let s = (0..h)
            .flat_map(|y| (0..w).map(move |x| (x, y)))
            .map(|(x, y)| Score(f(x, y)))
            .collect();
        ScoreMap::new(w, h, s)
    }

    #[test]
    fn nms_single_tile() {
        let s = grid(
            5,
            5,
            |x, y| if (x, y) == (3, 2) { 99 } else { (x + y) as i64 },
        );
        let c = nms_select_dense(&s, 4);
        assert_eq!(
            c,
            vec![Candidate {
                scale_id: 4,
                x: 3,
                y: 2,
                score: Score(99)
            }]
        );
    }

    #[test]
    fn nms_tile_count_and_ties() {
        assert_eq!(
            nms_select_dense(&grid(10, 10, |x, y| (x * y) as i64), 0).len(),
            4
        );
        let flat = nms_select_dense(&grid(7, 7, |_, _| 5), 0);
        let anchors: Vec<_> = flat.iter().map(|c| (c.x, c.y)).collect();
        assert_eq!(anchors, [(0, 0), (5, 0), (0, 5), (5, 5)]);
    }

    proptest! {
        #[test]
        fn distance_is_a_metric(a: [u8; 3], b: [u8; 3], c: [u8; 3]) {
            prop_assert_eq!(rgb_distance(a, b), rgb_distance(b, a));
            prop_assert_eq!(rgb_distance(a, a), 0);
            prop_assert!(u16::from(rgb_distance(a, c)) <= u16::from(rgb_distance(a, b)) + u16::from(rgb_distance(b, c)));
        }
    }
}
