//! Ranked matching and interpolated average precision.

use serde::{Deserialize, Serialize};

/// Outcome of matching one ranked detection list against ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApResult {
    /// Percent; `None` when there is no ground truth.
    pub ap: Option<f64>,
    /// Recall at the end of the ranked list, percent; `None` without ground truth.
    pub ar: Option<f64>,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

/// A scored detection or a ground-truth item, tagged with the image (or
/// frame) it belongs to. Matching never crosses images.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ranked<T> {
    pub image: u64,
    pub score: f64,
    pub item: T,
}

/// Marks each detection true/false positive. Detections are visited by
/// descending score (stable, so ties keep input order); each takes the
/// unmatched ground truth of its image with the highest IoU at or above
/// `threshold`. Returns `(scores, is_tp)` in visiting order.
pub fn match_detections<T, G>(
    dets: &[Ranked<T>],
    gts: &[Ranked<G>],
    iou: impl Fn(&T, &G) -> f64,
    threshold: f64,
) -> Vec<(f64, bool)> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| dets[b].score.total_cmp(&dets[a].score));
    let mut taken = vec![false; gts.len()];
    order
        .into_iter()
        .map(|i| {
            let d = &dets[i];
            let mut best: Option<(usize, f64)> = None;
            for (j, g) in gts.iter().enumerate() {
                if taken[j] || g.image != d.image {
                    continue;
                }
                let v = iou(&d.item, &g.item);
                if v >= threshold && best.is_none_or(|(_, b)| v > b) {
                    best = Some((j, v));
                }
            }
            if let Some((j, _)) = best {
                taken[j] = true;
            }
            (d.score, best.is_some())
        })
        .collect()
}

/// Precision/recall operating points, one per distinct score threshold.
/// Each point is `(true positives, detections kept)`.
fn operating_points(ranked: &[(f64, bool)]) -> Vec<(usize, usize)> {
    let mut points = Vec::new();
    let mut tp = 0;
    for (i, &(score, hit)) in ranked.iter().enumerate() {
        tp += usize::from(hit);
        let group_ends = ranked.get(i + 1).is_none_or(|next| next.0 != score);
        if group_ends {
            points.push((tp, i + 1));
        }
    }
    points
}

/// Interpolated AP over `n_recall_points` recall levels `1/n, 2/n, ..., 1`
/// (recall 0 excluded), in percent.
pub fn interpolated_ap(ranked: &[(f64, bool)], n_gt: usize, n_recall_points: usize) -> Option<f64> {
    if n_gt == 0 || n_recall_points == 0 {
        return None;
    }
    let points = operating_points(ranked);
    let mut sum = 0.0;
    for level in 1..=n_recall_points {
        // recall >= level / n  <=>  tp * n >= level * n_gt
        let best = points
            .iter()
            .filter(|(tp, _)| tp * n_recall_points >= level * n_gt)
            .map(|&(tp, kept)| tp as f64 / kept as f64)
            .fold(0.0, f64::max);
        sum += best;
    }
    Some(sum / n_recall_points as f64 * 100.0)
}

pub fn average_precision<T, G>(
    dets: &[Ranked<T>],
    gts: &[Ranked<G>],
    iou: impl Fn(&T, &G) -> f64,
    threshold: f64,
    n_recall_points: usize,
) -> ApResult {
    let ranked = match_detections(dets, gts, iou, threshold);
    let tp = ranked.iter().filter(|(_, hit)| *hit).count();
    let n_gt = gts.len();
    ApResult {
        ap: interpolated_ap(&ranked, n_gt, n_recall_points),
        ar: (n_gt > 0).then(|| tp as f64 / n_gt as f64 * 100.0),
        tp,
        fp: ranked.len() - tp,
        fn_: n_gt - tp,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn same(a: &u32, b: &u32) -> f64 {
        if a == b {
            1.0
        } else {
            0.0
        }
    }

    #[test]
    fn perfect_detections() {
        let gts: Vec<_> = (0..5).map(|i| Ranked { image: 0, score: 1.0, item: i }).collect();
        let r = average_precision(&gts, &gts, same, 0.5, 40);
        assert_eq!(r.ap, Some(100.0));
        assert_eq!(r.ar, Some(100.0));
        assert_eq!((r.tp, r.fp, r.fn_), (5, 0, 0));
    }

    #[test]
    fn empty_detections_and_empty_truth() {
        let gts = [Ranked { image: 0, score: 1.0, item: 1u32 }];
        let none: [Ranked<u32>; 0] = [];
        assert_eq!(average_precision(&none, &gts, same, 0.5, 40).ap, Some(0.0));
        assert_eq!(average_precision(&gts, &none, same, 0.5, 40).ap, None);
    }

    #[test]
    fn tp_then_fp() {
        let gts = [Ranked { image: 0, score: 1.0, item: 1u32 }];
        let dets = [
            Ranked { image: 0, score: 0.9, item: 1u32 },
            Ranked { image: 0, score: 0.8, item: 2u32 },
        ];
        // Recall reaches 1 at the first detection with precision 1.
        assert_eq!(average_precision(&dets, &gts, same, 0.5, 40).ap, Some(100.0));
        let flipped = [
            Ranked { image: 0, score: 0.8, item: 1u32 },
            Ranked { image: 0, score: 0.9, item: 2u32 },
        ];
        assert_eq!(average_precision(&flipped, &gts, same, 0.5, 40).ap, Some(50.0));
    }

    #[test]
    fn matching_stays_within_an_image() {
        let gts = [Ranked { image: 1, score: 1.0, item: 1u32 }];
        let dets = [Ranked { image: 2, score: 0.9, item: 1u32 }];
        let r = average_precision(&dets, &gts, same, 0.5, 40);
        assert_eq!((r.tp, r.fp, r.fn_), (0, 1, 1));
    }
}
