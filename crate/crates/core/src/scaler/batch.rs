use crate::imageio::RgbImage;

/// Rows per batch.
pub const BATCH_ROWS: usize = 4;

/// Four vertically adjacent pixels of one column, the unit streamed into the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelBatch {
    pub x: usize,
    /// Row band; covers rows `band * 4 .. band * 4 + 3`.
    pub band: usize,
    /// Top to bottom; entries past `valid` replicate the last valid pixel.
    pub pixels: [[u8; 3]; BATCH_ROWS],
    pub valid: u8,
}

impl PixelBatch {
    pub fn first_row(&self) -> usize {
        self.band * BATCH_ROWS
    }

    pub fn valid_pixels(&self) -> &[[u8; 3]] {
        &self.pixels[..self.valid as usize]
    }

    /// Reads the batch at `(x, band)` straight from the image.
    pub fn fetch(img: &RgbImage, x: usize, band: usize) -> Self {
        let row0 = band * BATCH_ROWS;
        debug_assert!(row0 < img.height() && x < img.width());
        let valid = (img.height() - row0).min(BATCH_ROWS);
        let pixels = std::array::from_fn(|r| img.pixel(x, row0 + r.min(valid - 1)));
        PixelBatch {
            x,
            band,
            pixels,
            valid: valid as u8,
        }
    }
}

pub fn band_count(height: usize) -> usize {
    height.div_ceil(BATCH_ROWS)
}

/// Band-major, left-to-right batch traversal of an image.
#[derive(Debug, Clone)]
pub struct BatchStream<'a> {
    img: &'a RgbImage,
    next: usize,
    total: usize,
}

impl Iterator for BatchStream<'_> {
    type Item = PixelBatch;

    fn next(&mut self) -> Option<PixelBatch> {
        if self.next == self.total {
            return None;
        }
        let w = self.img.width();
        let batch = PixelBatch::fetch(self.img, self.next % w, self.next / w);
        self.next += 1;
        Some(batch)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.total - self.next;
        (n, Some(n))
    }
}

impl ExactSizeIterator for BatchStream<'_> {}

pub fn stream_batches(img: &RgbImage) -> BatchStream<'_> {
    BatchStream {
        img,
        next: 0,
        total: band_count(img.height()) * img.width(),
    }
}

/// Rebuilds an image from the valid rows of a batch stream.
pub fn reassemble(
    width: usize,
    height: usize,
    batches: impl IntoIterator<Item = PixelBatch>,
) -> RgbImage {
    let mut img = RgbImage::filled(width, height, [0; 3]);
    for b in batches {
        for (r, &p) in b.valid_pixels().iter().enumerate() {
            img.set_pixel(b.x, b.first_row() + r, p);
        }
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numbered(w: usize, h: usize) -> RgbImage {
        RgbImage::from_fn(w, h, |x, y| [x as u8, y as u8, (x * h + y) as u8])
    }

    #[test]
    fn single_band_is_columns() {
        let img = numbered(4, 4);
        let batches: Vec<_> = stream_batches(&img).collect();
        assert_eq!(batches.len(), 4);
        for (k, b) in batches.iter().enumerate() {
            assert_eq!((b.x, b.band, b.valid), (k, 0, 4));
            for r in 0..4 {
                assert_eq!(b.pixels[r], img.pixel(k, r));
            }
        }
    }

    #[test]
    fn partial_band_replicates_last_row() {
        let img = numbered(1, 6);
        let batches: Vec<_> = stream_batches(&img).collect();
        assert_eq!(batches.len(), 2);
        assert_eq!(batches[0].valid, 4);
        let b = batches[1];
        assert_eq!((b.band, b.valid), (1, 2));
        assert_eq!(
            b.pixels,
            [
                img.pixel(0, 4),
                img.pixel(0, 5),
                img.pixel(0, 5),
                img.pixel(0, 5)
            ]
        );
    }

    #[test]
    fn reassembly_restores_image() {
        for (w, h) in [(1, 1), (3, 5), (8, 8), (13, 10), (2, 17)] {
            let img = numbered(w, h);
            let batches: Vec<_> = stream_batches(&img).collect();
            assert_eq!(batches.len(), h.div_ceil(4) * w);
            let valid: usize = batches.iter().map(|b| b.valid as usize).sum();
            assert_eq!(valid, w * h);
            assert_eq!(reassemble(w, h, batches), img);
        }
    }
}
