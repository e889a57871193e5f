//! Class-agnostic proposal quality: IoU, detection rate and MABO against
//! ground truth, each as a curve over the proposal budget (#WIN).

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::imageio::GroundTruth;
use crate::selector::{BoundingBox, Proposal};

pub const DEFAULT_IOU_THRESH: f64 = 0.4;
pub const DEFAULT_BUDGETS: [usize; 4] = [1, 10, 100, 1000];

/// Ranked proposals per image id, strongest first.
pub type ProposalSet = BTreeMap<String, Vec<Proposal>>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub nwin: usize,
    pub value: f64,
}

pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let inter = a.intersection_area(b);
    if inter == 0 {
        return 0.0;
    }
    inter as f64 / (a.area() + b.area() - inter) as f64
}

fn check_budgets(budgets: &[usize]) -> Result<Vec<usize>> {
    if budgets.is_empty() || budgets.contains(&0) {
        return Err(Error::InvalidArgument(
            "budgets must be non-empty and positive".into(),
        ));
    }
    let mut b = budgets.to_vec();
    b.sort_unstable();
    b.dedup();
    Ok(b)
}

fn ranked<'a>(proposals: &'a ProposalSet, image_id: &str) -> Result<&'a [Proposal]> {
    let list = proposals.get(image_id).map(Vec::as_slice).unwrap_or(&[]);
    if list.windows(2).any(|w| w[0].score < w[1].score) {
        return Err(Error::InvalidArgument(format!(
            "proposals for {image_id:?} are not sorted by descending score"
        )));
    }
    Ok(list)
}

/// Best IoU among the first `m` proposals, for every `m` in `1..=max_budget`,
/// for one ground-truth box. Entries past the list length repeat the last value.
fn best_overlap_prefix(gt: &BoundingBox, list: &[Proposal], max_budget: usize) -> Vec<f64> {
    let mut best = 0.0f64;
    let mut out = Vec::with_capacity(max_budget);
    for m in 0..max_budget {
        if let Some(p) = list.get(m) {
            best = best.max(iou(gt, &p.bbox));
        }
        out.push(best);
    }
    out
}

/// Fraction of all ground-truth objects hit (IoU >= `thresh`) by at least one
/// of their image's first `m` proposals, for each budget `m`.
///
/// One proposal may cover several objects. Images without proposals count as misses.
pub fn detection_rate(
    proposals: &ProposalSet,
    gt: &[GroundTruth],
    thresh: f64,
    budgets: &[usize],
) -> Result<Vec<CurvePoint>> {
    if !(thresh > 0.0 && thresh < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "IoU threshold {thresh} outside (0, 1)"
        )));
    }
    let budgets = check_budgets(budgets)?;
    let mut first_hit: Vec<Option<usize>> = Vec::new();
    for image in gt {
        let list = ranked(proposals, &image.image_id)?;
        for obj in &image.objects {
            first_hit.push(list.iter().position(|p| iou(&obj.bbox, &p.bbox) >= thresh));
        }
    }
    if first_hit.is_empty() {
        return Err(Error::NoGroundTruth);
    }
    let total = first_hit.len() as f64;
    Ok(budgets
        .into_iter()
        .map(|m| {
            let hits = first_hit
                .iter()
                .filter(|r| r.is_some_and(|r| r < m))
                .count();
            CurvePoint {
                nwin: m,
                value: hits as f64 / total,
            }
        })
        .collect())
}

/// Mean over classes of the average best overlap of that class's objects
/// with their image's first `m` proposals, for each budget `m`.
pub fn mabo(
    proposals: &ProposalSet,
    gt: &[GroundTruth],
    budgets: &[usize],
) -> Result<Vec<CurvePoint>> {
    let budgets = check_budgets(budgets)?;
    let max_budget = *budgets.last().expect("non-empty");
    let mut per_class: BTreeMap<&str, Vec<Vec<f64>>> = BTreeMap::new();
    for image in gt {
        let list = ranked(proposals, &image.image_id)?;
        for obj in &image.objects {
            per_class
                .entry(obj.class_label.as_str())
                .or_default()
                .push(best_overlap_prefix(&obj.bbox, list, max_budget));
        }
    }
    if per_class.is_empty() {
        return Err(Error::NoGroundTruth);
    }
    Ok(budgets
        .into_iter()
        .map(|m| {
            let abo_sum: f64 = per_class
                .values()
                .map(|objs| objs.iter().map(|p| p[m - 1]).sum::<f64>() / objs.len() as f64)
                .sum();
            CurvePoint {
                nwin: m,
                value: abo_sum / per_class.len() as f64,
            }
        })
        .collect())
}

/// Object counts per class label.
pub fn class_counts(gt: &[GroundTruth]) -> HashMap<&str, usize> {
    let mut counts = HashMap::new();
    for obj in gt.iter().flat_map(|g| &g.objects) {
        *counts.entry(obj.class_label.as_str()).or_default() += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imageio::GtObject;

    fn b(x0: u32, y0: u32, x1: u32, y1: u32) -> BoundingBox {
        BoundingBox::new(x0, y0, x1, y1)
    }

    fn prop(bbox: BoundingBox, score: f64) -> Proposal {
        Proposal {
            bbox,
            score,
            scale_id: 0,
        }
    }

    fn image(id: &str, objects: &[(&str, BoundingBox)]) -> GroundTruth {
        GroundTruth {
            image_id: id.into(),
            objects: objects
                .iter()
                .map(|&(c, bbox)| GtObject {
                    class_label: c.into(),
                    bbox,
                })
                .collect(),
        }
    }

    fn set(id: &str, boxes: &[BoundingBox]) -> ProposalSet {
        let n = boxes.len() as f64;
        let list = boxes
            .iter()
            .enumerate()
            .map(|(i, &bb)| prop(bb, n - i as f64))
            .collect();
        BTreeMap::from([(id.to_string(), list)])
    }

    #[test]
    fn iou_examples() {
        let a = b(0, 0, 1, 1);
        assert_eq!(iou(&a, &a), 1.0);
        assert_eq!(iou(&a, &b(5, 5, 9, 9)), 0.0);
        assert!((iou(&a, &b(1, 0, 2, 1)) - 2.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_first_proposal() {
        let gt = [image("a", &[("dog", b(10, 10, 50, 50))])];
        let p = set("a", &[b(10, 10, 50, 50)]);
        assert_eq!(detection_rate(&p, &gt, 0.4, &[1]).unwrap()[0].value, 1.0);
        assert_eq!(mabo(&p, &gt, &[1]).unwrap()[0].value, 1.0);
    }

    #[test]
    fn no_overlap() {
        let gt = [image("a", &[("dog", b(10, 10, 50, 50))])];
        let p = set("a", &[b(100, 100, 120, 120)]);
        assert_eq!(detection_rate(&p, &gt, 0.4, &[1, 5]).unwrap()[1].value, 0.0);
    }

    #[test]
    fn covered_at_rank_three() {
        let gt = [image(
            "a",
            &[("dog", b(0, 0, 9, 9)), ("cat", b(100, 100, 109, 109))],
        )];
        let miss = b(50, 50, 60, 60);
        let p = set("a", &[miss, miss, b(0, 0, 9, 9)]);
        let dr = detection_rate(&p, &gt, 0.5, &[3, 1]).unwrap();
        assert_eq!(
            dr,
            [
                CurvePoint {
                    nwin: 1,
                    value: 0.0
                },
                CurvePoint {
                    nwin: 3,
                    value: 0.5
                }
            ]
        );
    }

    #[test]
    fn mabo_averages_classes_not_objects() {
        // dog objects: IoU 1 and 0.6 -> ABO 0.8; cat: IoU 0.4 -> ABO 0.4; MABO 0.6
        let dog1 = b(0, 0, 9, 9);
        let dog2 = b(20, 0, 29, 9); // proposal (20,0,25,9): 60 / 100
        let cat = b(40, 0, 49, 9); // proposal (40,0,43,9): 40 / 100
        let gt = [image("a", &[("dog", dog1), ("dog", dog2), ("cat", cat)])];
        let p = set("a", &[dog1, b(20, 0, 25, 9), b(40, 0, 43, 9)]);
        let v = mabo(&p, &gt, &[3]).unwrap()[0].value;
        assert!((v - 0.6).abs() < 1e-12, "{v}");
    }

    #[test]
    fn missing_image_counts_as_miss() {
        let gt = [
            image("a", &[("dog", b(0, 0, 9, 9))]),
            image("b", &[("dog", b(0, 0, 9, 9))]),
        ];
        let p = set("a", &[b(0, 0, 9, 9)]);
        assert_eq!(detection_rate(&p, &gt, 0.4, &[1]).unwrap()[0].value, 0.5);
    }

    #[test]
    fn errors() {
        let p = ProposalSet::new();
        assert!(matches!(
            detection_rate(&p, &[], 0.4, &[1]),
            Err(Error::NoGroundTruth)
        ));
        assert!(matches!(
            detection_rate(&p, &[image("a", &[])], 0.4, &[1]),
            Err(Error::NoGroundTruth)
        ));
        assert!(matches!(mabo(&p, &[], &[1]), Err(Error::NoGroundTruth)));
        let gt = [image("a", &[("dog", b(0, 0, 9, 9))])];
        assert!(detection_rate(&p, &gt, 1.0, &[1]).is_err());
        assert!(detection_rate(&p, &gt, 0.5, &[0]).is_err());
        let unsorted = BTreeMap::from([(
            "a".to_string(),
            vec![prop(b(0, 0, 1, 1), 1.0), prop(b(0, 0, 1, 1), 2.0)],
        )]);
        assert!(detection_rate(&unsorted, &gt, 0.5, &[1]).is_err());
    }
}
