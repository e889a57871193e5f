//! Streaming CalcGrad, SVM-I and NMS stages.
//!
//! Every stage consumes vertical column runs in band-major, left-to-right
//! order and keeps a line buffer sized to its stencil height plus a memory
//! window a few columns wide. Outputs are again column runs, one band at a
//! time, so the stages chain without any full-frame buffer.

use serde::Serialize;

use super::buffers::{LineBuffer, MemoryWindow};
use super::dense::{saturated_gradient, NMS_TILE};
use super::types::{Candidate, Column, Score};
use crate::error::{Error, Result};
use crate::imageio::{SvmModel, FEATURE_LEN, WINDOW};
use crate::scaler::{band_count, PixelBatch, BATCH_ROWS};

pub const GRADIENT_LINE_ROWS: usize = 3;
pub const SVM_LINE_ROWS: usize = WINDOW;
pub const NMS_LINE_ROWS: usize = NMS_TILE;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StageStats {
    /// Scalar values consumed (pixels, gradients or scores).
    pub items_in: u64,
    /// Scalar values produced (gradients, scores or candidates).
    pub items_out: u64,
    pub line_buffer_rows: usize,
    pub peak_rows: usize,
}

pub trait Stage: Send {
    type Input: Send;
    type Output: Send;

    fn push(&mut self, item: Self::Input, out: &mut Vec<Self::Output>) -> Result<()>;

    /// Called once the input is exhausted; fails if the stream ended early.
    fn finish(&mut self) -> Result<()>;

    fn stats(&self) -> StageStats;
}

pub struct GradientStage {
    width: usize,
    height: usize,
    bands: usize,
    expect: (usize, usize),
    lines: LineBuffer<[u8; 3]>,
    window: MemoryWindow<Column<[u8; 3]>>,
    scratch: Vec<[u8; 3]>,
    next_row: usize,
    band_rows: (usize, usize),
    stats: StageStats,
}

impl GradientStage {
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width >= 1 && height >= 1);
        Self {
            width,
            height,
            bands: band_count(height),
            expect: (0, 0),
            lines: LineBuffer::new(GRADIENT_LINE_ROWS, width),
            window: MemoryWindow::new(3),
            scratch: Vec::with_capacity(GRADIENT_LINE_ROWS + BATCH_ROWS),
            next_row: 0,
            band_rows: (0, 0),
            stats: StageStats {
                line_buffer_rows: GRADIENT_LINE_ROWS,
                ..StageStats::default()
            },
        }
    }

    fn emit(&mut self, left: usize, center: usize, right: usize, out: &mut Vec<Column<u8>>) {
        let (lo, hi) = self.band_rows;
        let (l, c, r) = (
            self.window.back(left),
            self.window.back(center),
            self.window.back(right),
        );
        let values: Vec<u8> = (lo..=hi)
            .map(|y| {
                let up = c.at(y.saturating_sub(1));
                let down = c.at((y + 1).min(self.height - 1));
                saturated_gradient(l.at(y), r.at(y), up, down)
            })
            .collect();
        self.stats.items_out += values.len() as u64;
        out.push(Column {
            x: c.x,
            row0: lo,
            values,
        });
    }
}

impl Stage for GradientStage {
    type Input = PixelBatch;
    type Output = Column<u8>;

    fn push(&mut self, batch: PixelBatch, out: &mut Vec<Column<u8>>) -> Result<()> {
        if (batch.band, batch.x) != self.expect {
            return Err(Error::Stream(format!(
                "expected batch (band {}, column {}), got (band {}, column {})",
                self.expect.0, self.expect.1, batch.band, batch.x
            )));
        }
        let row0 = batch.first_row();
        let valid = (self.height - row0).min(BATCH_ROWS);
        if usize::from(batch.valid) != valid {
            return Err(Error::Stream(format!(
                "band {} carries {} valid rows, expected {valid}",
                batch.band, batch.valid
            )));
        }
        let x = batch.x;
        if x == 0 {
            self.window.clear();
            let last_band = row0 + valid == self.height;
            // rows whose lower neighbour has arrived; the bottom row clamps
            let hi = if last_band {
                self.height - 1
            } else {
                row0 + valid - 2
            };
            self.band_rows = (self.next_row, hi);
        }
        self.stats.items_in += valid as u64;

        let mut col = std::mem::take(&mut self.scratch);
        self.lines.exchange(x, batch.valid_pixels(), &mut col);
        let start = row0 + valid - col.len();
        self.window.push(Column {
            x,
            row0: start,
            values: col.clone(),
        });
        self.scratch = col;

        if self.band_rows.0 <= self.band_rows.1 {
            if x == 1 {
                self.emit(1, 1, 0, out);
            } else if x >= 2 {
                self.emit(2, 1, 0, out);
            }
            if x + 1 == self.width {
                let left = usize::from(self.width > 1);
                self.emit(left, 0, 0, out);
            }
        }

        if x + 1 == self.width {
            self.next_row = self.band_rows.1 + 1;
            self.expect = (batch.band + 1, 0);
        } else {
            self.expect = (batch.band, x + 1);
        }
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        if self.expect != (self.bands, 0) {
            return Err(Error::Stream(format!(
                "stream ended at (band {}, column {}) of {} bands",
                self.expect.0, self.expect.1, self.bands
            )));
        }
        Ok(())
    }

    fn stats(&self) -> StageStats {
        StageStats {
            peak_rows: self.lines.peak_rows(),
            ..self.stats
        }
    }
}

pub struct SvmStage {
    width: usize,
    win_h: usize,
    weights: [i64; FEATURE_LEN],
    lines: LineBuffer<u8>,
    window: MemoryWindow<Column<u8>>,
    scratch: Vec<u8>,
    next_anchor: usize,
    band_anchors: (usize, usize),
    stats: StageStats,
}

impl SvmStage {
    pub fn new(width: usize, height: usize, model: &SvmModel) -> Self {
        assert!(width >= WINDOW && height >= WINDOW);
        Self {
            width,
            win_h: height - WINDOW + 1,
            weights: *model.raw_weights(),
            lines: LineBuffer::new(SVM_LINE_ROWS, width),
            window: MemoryWindow::new(WINDOW),
            scratch: Vec::with_capacity(SVM_LINE_ROWS + BATCH_ROWS + 1),
            next_anchor: 0,
            band_anchors: (0, 0),
            stats: StageStats {
                line_buffer_rows: SVM_LINE_ROWS,
                ..StageStats::default()
            },
        }
    }

    /// Window score assembled from the eight per-row partial sums `G_1x8 . w_row`.
    fn score(&self, y: usize) -> Score {
        let mut total = 0i64;
        for k in 0..WINDOW {
            let w_row = &self.weights[k * WINDOW..(k + 1) * WINDOW];
            let partial: i64 = self
                .window
                .iter()
                .zip(w_row)
                .map(|(col, &w)| i64::from(col.at(y + k)) * w)
                .sum();
            total += partial;
        }
        Score(total)
    }
}

impl Stage for SvmStage {
    type Input = Column<u8>;
    type Output = Column<Score>;

    fn push(&mut self, g: Column<u8>, out: &mut Vec<Column<Score>>) -> Result<()> {
        let x = g.x;
        let last = g.last_row();
        if x == 0 {
            self.window.clear();
            let hi = (last + 1).saturating_sub(WINDOW).min(self.win_h - 1);
            // no anchor row completes until eight gradient rows exist
            self.band_anchors = if last + 1 >= WINDOW {
                (self.next_anchor, hi)
            } else {
                (1, 0)
            };
        }
        self.stats.items_in += g.values.len() as u64;

        let mut col = std::mem::take(&mut self.scratch);
        self.lines.exchange(x, &g.values, &mut col);
        let start = last + 1 - col.len();
        self.window.push(Column {
            x,
            row0: start,
            values: col.clone(),
        });
        self.scratch = col;

        let (lo, hi) = self.band_anchors;
        if x + 1 >= WINDOW && lo <= hi {
            debug_assert!(lo >= start);
            let values: Vec<Score> = (lo..=hi).map(|y| self.score(y)).collect();
            self.stats.items_out += values.len() as u64;
            out.push(Column {
                x: x + 1 - WINDOW,
                row0: lo,
                values,
            });
        }
        if x + 1 == self.width && lo <= hi {
            self.next_anchor = hi + 1;
        }
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        if self.next_anchor != self.win_h {
            return Err(Error::Stream(format!(
                "SVM stage finished after {} of {} anchor rows",
                self.next_anchor, self.win_h
            )));
        }
        Ok(())
    }

    fn stats(&self) -> StageStats {
        StageStats {
            peak_rows: self.lines.peak_rows(),
            ..self.stats
        }
    }
}

/// Row-first maximum registers for one band of one tile row.
struct TileRow {
    top: usize,
    bottom: usize,
    rows: Vec<Option<(Score, usize)>>,
}

impl TileRow {
    fn reset(&mut self) {
        self.rows.iter_mut().for_each(|r| *r = None);
    }

    /// Max over the row maxima; strict comparisons keep the smallest `(y, x)`.
    fn best(&self, scale_id: u32) -> Candidate {
        let mut best: Option<Candidate> = None;
        for (i, reg) in self.rows.iter().enumerate() {
            let (score, x) = reg.expect("tile row register filled");
            if best.is_none_or(|b| score > b.score) {
                best = Some(Candidate {
                    scale_id,
                    x,
                    y: self.top + i,
                    score,
                });
            }
        }
        best.expect("tile has at least one row")
    }
}

pub struct NmsStage {
    scale_id: u32,
    win_w: usize,
    win_h: usize,
    lines: LineBuffer<Score>,
    scratch: Vec<Score>,
    next_tile_row: usize,
    active: Vec<TileRow>,
    pending: Vec<Candidate>,
    stats: StageStats,
}

impl NmsStage {
    pub fn new(win_w: usize, win_h: usize, scale_id: u32) -> Self {
        assert!(win_w >= 1 && win_h >= 1);
        Self {
            scale_id,
            win_w,
            win_h,
            lines: LineBuffer::new(NMS_LINE_ROWS, win_w),
            scratch: Vec::with_capacity(NMS_LINE_ROWS + BATCH_ROWS + 1),
            next_tile_row: 0,
            active: Vec::new(),
            pending: Vec::new(),
            stats: StageStats {
                line_buffer_rows: NMS_LINE_ROWS,
                ..StageStats::default()
            },
        }
    }
}

impl Stage for NmsStage {
    type Input = Column<Score>;
    type Output = Candidate;

    fn push(&mut self, s: Column<Score>, out: &mut Vec<Candidate>) -> Result<()> {
        let x = s.x;
        let last = s.last_row();
        if x == 0 {
            // tile rows whose bottom score row arrives in this band
            self.active.clear();
            loop {
                let top = self.next_tile_row * NMS_TILE;
                let bottom = (top + NMS_TILE - 1).min(self.win_h - 1);
                if top >= self.win_h || bottom > last {
                    break;
                }
                self.active.push(TileRow {
                    top,
                    bottom,
                    rows: vec![None; bottom - top + 1],
                });
                self.next_tile_row += 1;
            }
        }
        self.stats.items_in += s.values.len() as u64;
        let emitted_before = out.len();

        let mut col = std::mem::take(&mut self.scratch);
        self.lines.exchange(x, &s.values, &mut col);
        let start = last + 1 - col.len();

        let tile_end = x % NMS_TILE == NMS_TILE - 1 || x + 1 == self.win_w;
        for (i, tile) in self.active.iter_mut().enumerate() {
            debug_assert!(tile.top >= start);
            for y in tile.top..=tile.bottom {
                let v = col[y - start];
                let reg = &mut tile.rows[y - tile.top];
                if reg.is_none_or(|(best, _)| v > best) {
                    *reg = Some((v, x));
                }
            }
            if tile_end {
                let cand = tile.best(self.scale_id);
                tile.reset();
                // later tile rows wait for the band to end to keep tile-row-major order
                if i == 0 {
                    out.push(cand);
                } else {
                    self.pending.push(cand);
                }
            }
        }
        self.scratch = col;

        if x + 1 == self.win_w {
            out.append(&mut self.pending);
        }
        self.stats.items_out += (out.len() - emitted_before) as u64;
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        if self.next_tile_row != self.win_h.div_ceil(NMS_TILE) {
            return Err(Error::Stream(
                "NMS stage finished with incomplete tile rows".into(),
            ));
        }
        Ok(())
    }

    fn stats(&self) -> StageStats {
        StageStats {
            peak_rows: self.lines.peak_rows(),
            ..self.stats
        }
    }
}
