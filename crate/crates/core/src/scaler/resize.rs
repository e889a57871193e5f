use super::ScaleSpec;
use crate::imageio::RgbImage;

/// Source sample positions and blend weights along one axis.
struct AxisMap {
    lo: Vec<usize>,
    hi: Vec<usize>,
    frac: Vec<f64>,
}

impl AxisMap {
    // center-aligned: src = (dst + 0.5) * src_len / dst_len - 0.5, clamped to the image
    fn new(src_len: usize, dst_len: usize) -> Self {
        let mut map = AxisMap {
            lo: Vec::with_capacity(dst_len),
            hi: Vec::with_capacity(dst_len),
            frac: Vec::with_capacity(dst_len),
        };
        let max = (src_len - 1) as f64;
        for d in 0..dst_len {
            let src = ((d as f64 + 0.5) * src_len as f64 / dst_len as f64 - 0.5).clamp(0.0, max);
            let lo = src.floor() as usize;
            map.lo.push(lo);
            map.hi.push((lo + 1).min(src_len - 1));
            map.frac.push(src - lo as f64);
        }
        map
    }
}

/// Bilinear resize to the scale's target dimensions, rounding half up per channel.
pub fn resize_bilinear(img: &RgbImage, spec: &ScaleSpec) -> RgbImage {
    resize_to(img, spec.target_w, spec.target_h)
}

pub fn resize_to(img: &RgbImage, target_w: usize, target_h: usize) -> RgbImage {
    if (target_w, target_h) == (img.width(), img.height()) {
        return img.clone();
    }
    let xs = AxisMap::new(img.width(), target_w);
    let ys = AxisMap::new(img.height(), target_h);
    RgbImage::from_fn(target_w, target_h, |x, y| {
        let (fx, fy) = (xs.frac[x], ys.frac[y]);
        let p00 = img.pixel(xs.lo[x], ys.lo[y]);
        let p10 = img.pixel(xs.hi[x], ys.lo[y]);
        let p01 = img.pixel(xs.lo[x], ys.hi[y]);
        let p11 = img.pixel(xs.hi[x], ys.hi[y]);
        std::array::from_fn(|c| {
            let top = p00[c] as f64 * (1.0 - fx) + p10[c] as f64 * fx;
            let bottom = p01[c] as f64 * (1.0 - fx) + p11[c] as f64 * fx;
            let v = top * (1.0 - fy) + bottom * fy;
            (v + 0.5).floor().clamp(0.0, 255.0) as u8
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(w: usize, h: usize) -> ScaleSpec {
        ScaleSpec {
            scale_id: 0,
            base_w: 8,
            base_h: 8,
            target_w: w,
            target_h: h,
        }
    }

    #[test]
    fn identity_dimensions() {
        let img = RgbImage::from_fn(9, 11, |x, y| {
            [(x * 20) as u8, (y * 13) as u8, (x ^ y) as u8]
        });
        assert_eq!(resize_bilinear(&img, &spec(9, 11)), img);
    }

    #[test]
    fn two_to_one_averages() {
        let img = RgbImage::new(2, 1, vec![0, 0, 0, 100, 100, 100]).unwrap();
        let out = resize_to(&img, 1, 1);
        assert_eq!(out.pixel(0, 0), [50, 50, 50]);
    }

    #[test]
    fn upsample_interpolates() {
        // 2 -> 4: src = (d + 0.5) / 2 - 0.5 = -0.25, 0.25, 0.75, 1.25 -> clamp
        let img = RgbImage::new(2, 1, vec![0, 0, 0, 200, 200, 200]).unwrap();
        let out = resize_to(&img, 4, 1);
        let r: Vec<u8> = out.pixels().map(|p| p[0]).collect();
        assert_eq!(r, [0, 50, 150, 200]);
    }

    #[test]
    fn constant_stays_constant() {
        let img = RgbImage::filled(37, 23, [12, 200, 77]);
        let out = resize_to(&img, 8, 50);
        assert!(out.pixels().all(|p| p == [12, 200, 77]));
    }

    proptest! {
        #[test]
        fn output_within_source_range(
            w in 1usize..20, h in 1usize..20, tw in 1usize..30, th in 1usize..30, seed: u64,
        ) {
            let mut s = seed;
            let img = RgbImage::from_fn(w, h, |_, _| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let b = (s >> 33).to_le_bytes();
                [b[0], b[1], b[2]]
            });
            let out = resize_to(&img, tw, th);
            for c in 0..3 {
                let lo = img.pixels().map(|p| p[c]).min().unwrap();
                let hi = img.pixels().map(|p| p[c]).max().unwrap();
                prop_assert!(out.pixels().all(|p| p[c] >= lo && p[c] <= hi));
            }
        }
    }
}
