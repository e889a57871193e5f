use std::fmt;

use serde::Serialize;

use crate::imageio::WEIGHT_SCALE;

/// Window score in Q16 fixed point; exact for any summation order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Score(pub i64);

impl Score {
    pub fn to_f64(self) -> f64 {
        self.0 as f64 / WEIGHT_SCALE
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

/// Saturated per-pixel gradient magnitudes, same dimensions as the source image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientMap {
    pub width: usize,
    pub height: usize,
    pub g: Vec<u8>,
}

impl GradientMap {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.g[y * self.width + x]
    }
}

/// Scores of every 8x8 window, indexed by the window's top-left anchor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreMap {
    pub win_w: usize,
    pub win_h: usize,
    pub s: Vec<Score>,
}

impl ScoreMap {
    pub fn new(win_w: usize, win_h: usize, s: Vec<Score>) -> Self {
        assert!(win_w >= 1 && win_h >= 1, "score grid must be non-empty");
        assert_eq!(s.len(), win_w * win_h, "score grid size mismatch");
        Self { win_w, win_h, s }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Score {
        self.s[y * self.win_w + x]
    }
}

/// An NMS survivor: window anchor in resized-image coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Candidate {
    pub scale_id: u32,
    pub x: usize,
    pub y: usize,
    pub score: Score,
}

/// A vertical run of values in one column, the unit passed between kernel stages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column<T> {
    pub x: usize,
    /// Row of `values[0]`.
    pub row0: usize,
    pub values: Vec<T>,
}

impl<T: Copy> Column<T> {
    #[inline]
    pub fn at(&self, row: usize) -> T {
        self.values[row - self.row0]
    }

    pub fn last_row(&self) -> usize {
        self.row0 + self.values.len() - 1
    }
}
