use std::collections::VecDeque;

/// Full-width row cache holding the most recent `rows` values of every column.
///
/// Columns are exchanged one at a time: the caller receives the cached rows
/// followed by the incoming ones, and the newest `rows` values are kept.
#[derive(Debug, Clone)]
pub struct LineBuffer<T> {
    rows: usize,
    data: Vec<T>,
    len: Vec<usize>,
    peak: usize,
}

impl<T: Copy + Default> LineBuffer<T> {
    pub fn new(rows: usize, width: usize) -> Self {
        Self {
            rows,
            data: vec![T::default(); rows * width],
            len: vec![0; width],
            peak: 0,
        }
    }

    /// Returns the cached rows of column `x` plus `incoming` (oldest first) in `out`.
    pub fn exchange(&mut self, x: usize, incoming: &[T], out: &mut Vec<T>) {
        out.clear();
        let slot = &mut self.data[x * self.rows..(x + 1) * self.rows];
        out.extend_from_slice(&slot[..self.len[x]]);
        out.extend_from_slice(incoming);
        let keep = out.len().min(self.rows);
        slot[..keep].copy_from_slice(&out[out.len() - keep..]);
        self.len[x] = keep;
        self.peak = self.peak.max(keep);
    }

    pub fn capacity_rows(&self) -> usize {
        self.rows
    }

    /// Most rows ever resident in any column.
    pub fn peak_rows(&self) -> usize {
        self.peak
    }
}

/// Sliding window over the most recent `cols` columns.
#[derive(Debug, Clone)]
pub struct MemoryWindow<C> {
    cols: usize,
    buf: VecDeque<C>,
}

impl<C> MemoryWindow<C> {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            buf: VecDeque::with_capacity(cols),
        }
    }

    pub fn push(&mut self, col: C) {
        if self.buf.len() == self.cols {
            self.buf.pop_front();
        }
        self.buf.push_back(col);
    }

    pub fn clear(&mut self) {
        self.buf.clear();
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    /// Column `back` positions before the newest one.
    pub fn back(&self, back: usize) -> &C {
        &self.buf[self.buf.len() - 1 - back]
    }

    pub fn iter(&self) -> impl Iterator<Item = &C> {
        self.buf.iter()
    }
}
