use std::collections::VecDeque;

use crossbeam_channel::{bounded, Receiver, Sender};
use serde::Serialize;

use super::stages::{GradientStage, NmsStage, Stage, StageStats, SvmStage};
use super::types::Candidate;
use crate::error::{Error, Result};
use crate::imageio::{SvmModel, WINDOW};
use crate::scaler::PixelBatch;

pub const DEFAULT_FIFO_CAPACITY: usize = 64;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct KernelStats {
    pub gradient: StageStats,
    pub svm: StageStats,
    pub nms: StageStats,
    pub fifo_capacity: usize,
    pub fifo_peak: usize,
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width < WINDOW || height < WINDOW {
        return Err(Error::InvalidArgument(format!(
            "kernel input {width}x{height} is smaller than the {WINDOW}x{WINDOW} window"
        )));
    }
    Ok(())
}

/// CalcGrad -> SVM-I -> NMS chain pulled one batch at a time.
///
/// Candidates leave through a bounded FIFO. When NMS releases more candidates
/// than the FIFO can hold, the surplus stays stalled in the stage and no new
/// batch is pulled until the consumer has made room.
pub struct KernelStream<I> {
    batches: I,
    gradient: GradientStage,
    svm: SvmStage,
    nms: NmsStage,
    fifo: VecDeque<Candidate>,
    fifo_capacity: usize,
    fifo_peak: usize,
    stalled: VecDeque<Candidate>,
    grad_buf: Vec<super::Column<u8>>,
    score_buf: Vec<super::Column<super::Score>>,
    cand_buf: Vec<Candidate>,
    done: bool,
}

/// Streams candidates for one resized image of `width` x `height` pixels.
pub fn kernel_stream<I>(
    batches: I,
    width: usize,
    height: usize,
    model: &SvmModel,
    scale_id: u32,
) -> Result<KernelStream<I::IntoIter>>
where
    I: IntoIterator<Item = PixelBatch>,
{
    KernelStream::with_fifo_capacity(
        batches,
        width,
        height,
        model,
        scale_id,
        DEFAULT_FIFO_CAPACITY,
    )
}

impl<I: Iterator<Item = PixelBatch>> KernelStream<I> {
    pub fn with_fifo_capacity(
        batches: impl IntoIterator<IntoIter = I>,
        width: usize,
        height: usize,
        model: &SvmModel,
        scale_id: u32,
        fifo_capacity: usize,
    ) -> Result<Self> {
        check_dims(width, height)?;
        if fifo_capacity == 0 {
            return Err(Error::InvalidArgument(
                "FIFO capacity must be positive".into(),
            ));
        }
        let (win_w, win_h) = (width - WINDOW + 1, height - WINDOW + 1);
        Ok(Self {
            batches: batches.into_iter(),
            gradient: GradientStage::new(width, height),
            svm: SvmStage::new(width, height, model),
            nms: NmsStage::new(win_w, win_h, scale_id),
            fifo: VecDeque::with_capacity(fifo_capacity),
            fifo_capacity,
            fifo_peak: 0,
            stalled: VecDeque::new(),
            grad_buf: Vec::new(),
            score_buf: Vec::new(),
            cand_buf: Vec::new(),
            done: false,
        })
    }

    pub fn stats(&self) -> KernelStats {
        KernelStats {
            gradient: self.gradient.stats(),
            svm: self.svm.stats(),
            nms: self.nms.stats(),
            fifo_capacity: self.fifo_capacity,
            fifo_peak: self.fifo_peak,
        }
    }

    fn refill_fifo(&mut self) {
        while self.fifo.len() < self.fifo_capacity {
            match self.stalled.pop_front() {
                Some(c) => self.fifo.push_back(c),
                None => break,
            }
        }
        self.fifo_peak = self.fifo_peak.max(self.fifo.len());
    }

    fn step(&mut self, batch: PixelBatch) -> Result<()> {
        self.gradient.push(batch, &mut self.grad_buf)?;
        for g in self.grad_buf.drain(..) {
            self.svm.push(g, &mut self.score_buf)?;
        }
        for s in self.score_buf.drain(..) {
            self.nms.push(s, &mut self.cand_buf)?;
        }
        self.stalled.extend(self.cand_buf.drain(..));
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        self.gradient.finish()?;
        self.svm.finish()?;
        self.nms.finish()
    }

    /// Drains the stream, returning every candidate in order.
    pub fn collect_all(mut self) -> Result<(Vec<Candidate>, KernelStats)> {
        let mut out = Vec::new();
        for c in self.by_ref() {
            out.push(c?);
        }
        Ok((out, self.stats()))
    }
}

impl<I: Iterator<Item = PixelBatch>> Iterator for KernelStream<I> {
    type Item = Result<Candidate>;

    fn next(&mut self) -> Option<Result<Candidate>> {
        loop {
            self.refill_fifo();
            if let Some(c) = self.fifo.pop_front() {
                return Some(Ok(c));
            }
            if self.done {
                return None;
            }
            let res = match self.batches.next() {
                Some(batch) => self.step(batch),
                None => {
                    self.done = true;
                    self.finish()
                }
            };
            if let Err(e) = res {
                self.done = true;
                self.stalled.clear();
                return Some(Err(e));
            }
        }
    }
}

/// Runs the kernel sequentially and collects the candidates.
pub fn run_kernel<I>(
    batches: I,
    width: usize,
    height: usize,
    model: &SvmModel,
    scale_id: u32,
) -> Result<(Vec<Candidate>, KernelStats)>
where
    I: IntoIterator<Item = PixelBatch>,
{
    kernel_stream(batches, width, height, model, scale_id)?.collect_all()
}

fn run_stage<S: Stage>(
    mut stage: S,
    rx: Receiver<S::Input>,
    tx: Sender<S::Output>,
) -> Result<StageStats> {
    let mut buf = Vec::new();
    for item in rx {
        stage.push(item, &mut buf)?;
        for out in buf.drain(..) {
            // a closed downstream means the consumer failed; stop quietly
            if tx.send(out).is_err() {
                return Ok(stage.stats());
            }
        }
    }
    stage.finish()?;
    Ok(stage.stats())
}

/// Runs each stage on its own thread, connected by bounded queues of
/// `queue_capacity` column runs; candidates pass through a FIFO of
/// `DEFAULT_FIFO_CAPACITY`. Output order is identical to [`run_kernel`].
///
/// `fifo_peak` depends on thread timing in this mode.
pub fn run_kernel_pipelined<I>(
    batches: I,
    width: usize,
    height: usize,
    model: &SvmModel,
    scale_id: u32,
    queue_capacity: usize,
) -> Result<(Vec<Candidate>, KernelStats)>
where
    I: IntoIterator<Item = PixelBatch>,
    I::IntoIter: Send,
{
    check_dims(width, height)?;
    let (win_w, win_h) = (width - WINDOW + 1, height - WINDOW + 1);
    let cap = queue_capacity.max(1);
    let (batch_tx, batch_rx) = bounded::<PixelBatch>(cap);
    let (grad_tx, grad_rx) = bounded(cap);
    let (score_tx, score_rx) = bounded(cap);
    let (fifo_tx, fifo_rx) = bounded::<Candidate>(DEFAULT_FIFO_CAPACITY);

    let gradient = GradientStage::new(width, height);
    let svm = SvmStage::new(width, height, model);
    let nms = NmsStage::new(win_w, win_h, scale_id);
    let batches = batches.into_iter();

    std::thread::scope(|s| {
        s.spawn(move || {
            for b in batches {
                if batch_tx.send(b).is_err() {
                    break;
                }
            }
        });
        let g = s.spawn(move || run_stage(gradient, batch_rx, grad_tx));
        let v = s.spawn(move || run_stage(svm, grad_rx, score_tx));
        let n = s.spawn(move || run_stage(nms, score_rx, fifo_tx));

        let mut out = Vec::new();
        let mut fifo_peak = 0;
        for c in fifo_rx.iter() {
            fifo_peak = fifo_peak.max(fifo_rx.len() + 1);
            out.push(c);
        }
        let join = |h: std::thread::ScopedJoinHandle<'_, Result<StageStats>>| {
            h.join().expect("kernel stage panicked")
        };
        let (g, v, n) = (join(g), join(v), join(n));
        let stats = KernelStats {
            gradient: g?,
            svm: v?,
            nms: n?,
            fifo_capacity: DEFAULT_FIFO_CAPACITY,
            fifo_peak,
        };
        Ok((out, stats))
    })
}
