use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use super::run::{proposal_digest, ImageReport, Pipeline};
use crate::error::{Error, Result};
use crate::eval::{detection_rate, mabo, CurvePoint, ProposalSet};
use crate::imageio::{load_ppm, write_curve, write_proposals, GroundTruth, RgbImage};

/// Image file for an annotation id: `<dir>/<image_id>.ppm`.
pub fn image_path(dir: &Path, image_id: &str) -> PathBuf {
    dir.join(format!("{image_id}.ppm"))
}

/// All `*.ppm` files in a directory, sorted by file name.
pub fn list_ppm_images(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("ppm"))
            && path.is_file()
        {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalSummary {
    pub images_evaluated: usize,
    pub images_missing: Vec<String>,
    pub objects: usize,
    pub iou_thresh: f64,
    pub detection_rate: Vec<CurvePoint>,
    pub mabo: Vec<CurvePoint>,
}

impl EvalSummary {
    pub fn lines(&self) -> Vec<String> {
        self.detection_rate
            .iter()
            .zip(&self.mabo)
            .map(|(dr, mb)| {
                format!(
                    "#WIN {:>5}  DR@{:.2} {:.4}  MABO {:.4}",
                    dr.nwin, self.iou_thresh, dr.value, mb.value
                )
            })
            .collect()
    }
}

/// Proposes windows for every annotated image and writes `dr.csv`, `mabo.csv`
/// and `proposals/<image_id>.csv` under `out_dir`.
///
/// Images whose file is absent are skipped with a warning and their objects
/// leave the denominator.
pub fn run_eval(
    image_dir: &Path,
    gt: &[GroundTruth],
    pipeline: &Pipeline,
    out_dir: &Path,
) -> Result<EvalSummary> {
    let mut present = Vec::with_capacity(gt.len());
    let mut missing = Vec::new();
    let mut proposals = ProposalSet::new();
    for image in gt {
        let path = image_path(image_dir, &image.image_id);
        if !path.is_file() {
            log::warn!(
                "{}: image file not found, excluded from evaluation",
                path.display()
            );
            missing.push(image.image_id.clone());
            continue;
        }
        let img = load_ppm(&path)?;
        let (props, _) = pipeline.run(&img)?;
        proposals.insert(image.image_id.clone(), props);
        present.push(image.clone());
    }
    let cfg = pipeline.config();
    let dr = detection_rate(&proposals, &present, cfg.iou_thresh, &cfg.budgets)?;
    let mb = mabo(&proposals, &present, &cfg.budgets)?;

    let prop_dir = out_dir.join("proposals");
    fs::create_dir_all(&prop_dir).map_err(|e| Error::io(&prop_dir, e))?;
    for (id, props) in &proposals {
        write_proposals(props, prop_dir.join(format!("{id}.csv")))?;
    }
    write_curve(&dr, out_dir.join("dr.csv"))?;
    write_curve(&mb, out_dir.join("mabo.csv"))?;

    Ok(EvalSummary {
        images_evaluated: present.len(),
        images_missing: missing,
        objects: present.iter().map(|g| g.objects.len()).sum(),
        iou_thresh: cfg.iou_thresh,
        detection_rate: dr,
        mabo: mb,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchImage {
    pub name: String,
    pub width: usize,
    pub height: usize,
    /// Wall time of every repeat.
    pub seconds: Vec<f64>,
    pub proposals: usize,
    pub digest: String,
    /// Stage statistics of the last repeat; identical across repeats.
    pub report: ImageReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub images: usize,
    pub repeats: usize,
    pub threads: usize,
    pub scheduler: super::config::Scheduler,
    /// Seconds to process all images, per repeat.
    pub timing_samples: Vec<f64>,
    /// Median over repeats of images / seconds.
    pub fps: f64,
    /// Every repeat produced byte-identical proposals.
    pub deterministic: bool,
    pub svm_items: u64,
    pub per_image: Vec<BenchImage>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Times the pipeline over `images` `repeats` times.
pub fn run_bench(
    images: &[(String, RgbImage)],
    pipeline: &Pipeline,
    repeats: usize,
) -> Result<BenchReport> {
    if images.is_empty() {
        return Err(Error::InvalidArgument(
            "benchmark needs at least one image".into(),
        ));
    }
    if repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be at least 1".into()));
    }
    let mut per_image: Vec<Option<BenchImage>> = vec![None; images.len()];
    let mut timing_samples = Vec::with_capacity(repeats);
    let mut deterministic = true;
    for _ in 0..repeats {
        let start = Instant::now();
        for ((name, img), slot) in images.iter().zip(per_image.iter_mut()) {
            let t = Instant::now();
            let (props, report) = pipeline.run(img)?;
            let secs = t.elapsed().as_secs_f64();
            let digest = proposal_digest(&props);
            match slot {
                None => {
                    *slot = Some(BenchImage {
                        name: name.clone(),
                        width: img.width(),
                        height: img.height(),
                        seconds: vec![secs],
                        proposals: props.len(),
                        digest,
                        report,
                    })
                }
                Some(prev) => {
                    deterministic &= prev.digest == digest;
                    prev.seconds.push(secs);
                    prev.report = report;
                }
            }
        }
        timing_samples.push(start.elapsed().as_secs_f64());
    }
    let per_image: Vec<BenchImage> = per_image
        .into_iter()
        .map(|b| b.expect("every image ran"))
        .collect();
    let fps = median(
        timing_samples
            .iter()
            .map(|&t| images.len() as f64 / t.max(f64::MIN_POSITIVE))
            .collect(),
    );
    Ok(BenchReport {
        images: images.len(),
        repeats,
        threads: pipeline.config().threads,
        scheduler: pipeline.config().scheduler,
        timing_samples,
        fps,
        deterministic,
        svm_items: per_image.iter().map(|b| b.report.svm_items()).sum(),
        per_image,
    })
}
