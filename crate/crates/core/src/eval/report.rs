use std::collections::BTreeMap;
use std::fmt;

use ndarray::{ArrayView2, Zip};
use serde::{Deserialize, Serialize};

use crate::bev::to_bev;
use crate::codec::{Box2D, Box3D, Frame, ObjectClass};
use crate::error::{Error, Result};
use crate::eval::{average_precision, iou_2d, iou_3d, iou_bev, ApResult, Ranked};

/// Annotation range; ground truth and detections beyond it are ignored for
/// the 3D and BEV metrics.
pub const VISIBLE_RANGE_M: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub iou_threshold_2d: f64,
    pub iou_threshold_3d: f64,
    pub n_recall_points: usize,
    /// Class-wise matching with the mean over classes when true; one
    /// class-agnostic pool otherwise.
    pub per_class: bool,
    /// Planar distance from the ego origin beyond which 3D/BEV items are dropped.
    pub max_range: f64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            iou_threshold_2d: 0.7,
            iou_threshold_3d: 0.5,
            n_recall_points: 40,
            per_class: true,
            max_range: VISIBLE_RANGE_M,
        }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |t: f64| t > 0.0 && t <= 1.0;
        if !in_unit(self.iou_threshold_2d) || !in_unit(self.iou_threshold_3d) {
            return Err(Error::InvalidArgument("IoU thresholds must lie in (0, 1]".into()));
        }
        if self.n_recall_points == 0 {
            return Err(Error::InvalidArgument("need at least one recall point".into()));
        }
        if !(self.max_range > 0.0) {
            return Err(Error::InvalidArgument("max range must be positive".into()));
        }
        Ok(())
    }
}

/// Mean of `|pred - gt| / gt` over the valid cells.
pub fn abs_rel(pred: ArrayView2<'_, f64>, gt: ArrayView2<'_, f64>, valid: ArrayView2<'_, bool>) -> Result<f64> {
    if pred.dim() != gt.dim() || valid.dim() != gt.dim() {
        return Err(Error::ShapeMismatch {
            expected: gt.shape().to_vec(),
            found: pred.shape().to_vec(),
        });
    }
    let (sum, count) = abs_rel_sums(pred, gt, valid)?;
    if count == 0 {
        return Err(Error::NoGroundTruth);
    }
    Ok(sum / count as f64)
}

fn abs_rel_sums(pred: ArrayView2<'_, f64>, gt: ArrayView2<'_, f64>, valid: ArrayView2<'_, bool>) -> Result<(f64, usize)> {
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut bad = false;
    Zip::from(&pred).and(&gt).and(&valid).for_each(|&p, &g, &m| {
        if m {
            if !(g > 0.0) {
                bad = true;
            }
            sum += (p - g).abs() / g;
            count += 1;
        }
    });
    if bad {
        return Err(Error::InvalidArgument("ground-truth depth must be positive on the mask".into()));
    }
    Ok((sum, count))
}

/// One 2D box with its image key (frame and camera) and class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Item2D {
    pub image: u64,
    pub class: ObjectClass,
    pub score: f64,
    pub box2d: Box2D,
}

/// One ego-frame 3D box with its frame id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Item3D {
    pub frame: u64,
    pub box3d: Box3D,
}

#[derive(Debug, Clone, Default)]
pub struct EvalInputs<'a> {
    pub gt_2d: Vec<Item2D>,
    pub det_2d: Vec<Item2D>,
    pub gt_3d: Vec<Item3D>,
    pub det_3d: Vec<Item3D>,
    pub depth: Vec<(ArrayView2<'a, f64>, ArrayView2<'a, f64>, ArrayView2<'a, bool>)>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub ap_2d: Option<f64>,
    pub ar_2d: Option<f64>,
    pub ap_3d: Option<f64>,
    pub ap_bev: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl Counts {
    fn add(&mut self, r: &ApResult) {
        self.tp += r.tp;
        self.fp += r.fp;
        self.fn_ += r.fn_;
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalReport {
    /// Mean over classes that have ground truth (or the class-agnostic value).
    pub ap_2d: Option<f64>,
    pub ar_2d: Option<f64>,
    pub ap_3d: Option<f64>,
    pub ap_bev: Option<f64>,
    pub abs_rel: Option<f64>,
    /// Empty in class-agnostic mode.
    pub per_class: BTreeMap<ObjectClass, ClassMetrics>,
    pub counts_2d: Counts,
    pub counts_3d: Counts,
    pub counts_bev: Counts,
    pub config: MatchConfig,
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let present: Vec<f64> = values.flatten().collect();
    (!present.is_empty()).then(|| present.iter().sum::<f64>() / present.len() as f64)
}

fn in_range(b: &Box3D, max_range: f64) -> bool {
    b.center[0].hypot(b.center[1]) <= max_range
}

/// Computes every metric. In class-wise mode each class is matched on its
/// own and the headline numbers are the mean over classes with ground truth.
pub fn evaluate(inputs: &EvalInputs<'_>, config: &MatchConfig) -> Result<EvalReport> {
    config.validate()?;
    if inputs.gt_3d.iter().chain(&inputs.det_3d).any(|i| i.box3d.frame != Frame::Ego) {
        return Err(Error::InvalidArgument("3D evaluation expects ego-frame boxes".into()));
    }

    let to2 = |items: &[Item2D], filter: Option<ObjectClass>| -> Vec<Ranked<Box2D>> {
        items
            .iter()
            .filter(|i| filter.is_none_or(|c| c == i.class))
            .map(|i| Ranked { image: i.image, score: i.score, item: i.box2d })
            .collect()
    };
    let to3 = |items: &[Item3D], filter: Option<ObjectClass>| -> Vec<Ranked<Box3D>> {
        items
            .iter()
            .filter(|i| filter.is_none_or(|c| c == i.box3d.class) && in_range(&i.box3d, config.max_range))
            .map(|i| Ranked { image: i.frame, score: i.box3d.score, item: i.box3d })
            .collect()
    };

    let mut report = EvalReport {
        config: *config,
        ..Default::default()
    };

    let groups: Vec<Option<ObjectClass>> = if config.per_class {
        ObjectClass::ALL.iter().map(|&c| Some(c)).collect()
    } else {
        vec![None]
    };

    let mut rows = Vec::new();
    for class in groups {
        let r2 = average_precision(
            &to2(&inputs.det_2d, class),
            &to2(&inputs.gt_2d, class),
            iou_2d,
            config.iou_threshold_2d,
            config.n_recall_points,
        );
        let (d3, g3) = (to3(&inputs.det_3d, class), to3(&inputs.gt_3d, class));
        let r3 = average_precision(&d3, &g3, iou_3d, config.iou_threshold_3d, config.n_recall_points);
        let rb = average_precision(
            &d3,
            &g3,
            |a: &Box3D, b: &Box3D| iou_bev(&to_bev(a, None), &to_bev(b, None)),
            config.iou_threshold_3d,
            config.n_recall_points,
        );
        report.counts_2d.add(&r2);
        report.counts_3d.add(&r3);
        report.counts_bev.add(&rb);
        let metrics = ClassMetrics {
            ap_2d: r2.ap,
            ar_2d: r2.ar,
            ap_3d: r3.ap,
            ap_bev: rb.ap,
        };
        if let Some(c) = class {
            report.per_class.insert(c, metrics.clone());
        }
        rows.push(metrics);
    }
    report.ap_2d = mean(rows.iter().map(|m| m.ap_2d));
    report.ar_2d = mean(rows.iter().map(|m| m.ar_2d));
    report.ap_3d = mean(rows.iter().map(|m| m.ap_3d));
    report.ap_bev = mean(rows.iter().map(|m| m.ap_bev));

    if !inputs.depth.is_empty() {
        let mut sum = 0.0;
        let mut count = 0usize;
        for (pred, gt, valid) in &inputs.depth {
            if pred.dim() != gt.dim() || valid.dim() != gt.dim() {
                return Err(Error::ShapeMismatch {
                    expected: gt.shape().to_vec(),
                    found: pred.shape().to_vec(),
                });
            }
            let (s, c) = abs_rel_sums(*pred, *gt, *valid)?;
            sum += s;
            count += c;
        }
        report.abs_rel = (count > 0).then(|| sum / count as f64);
    }
    Ok(report)
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.digits$}"))
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<16}{:>9}{:>9}{:>9}{:>9}", "class", "AP_2D", "AR_2D", "AP_3D", "AP_BEV")?;
        for (class, m) in &self.per_class {
            if m.ap_2d.is_none() && m.ap_3d.is_none() {
                continue;
            }
            writeln!(
                f,
                "{:<16}{:>9}{:>9}{:>9}{:>9}",
                class.as_str(),
                fmt_opt(m.ap_2d, 2),
                fmt_opt(m.ar_2d, 2),
                fmt_opt(m.ap_3d, 2),
                fmt_opt(m.ap_bev, 2)
            )?;
        }
        writeln!(
            f,
            "{:<16}{:>9}{:>9}{:>9}{:>9}",
            if self.config.per_class { "mean" } else { "all (agnostic)" },
            fmt_opt(self.ap_2d, 2),
            fmt_opt(self.ar_2d, 2),
            fmt_opt(self.ap_3d, 2),
            fmt_opt(self.ap_bev, 2)
        )?;
        writeln!(f, "abs_rel         {}", fmt_opt(self.abs_rel, 4))?;
        for (name, c) in [("2d", self.counts_2d), ("3d", self.counts_3d), ("bev", self.counts_bev)] {
            writeln!(f, "counts_{name:<9}tp {} fp {} fn {}", c.tp, c.fp, c.fn_)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn abs_rel_examples() {
        let valid = arr2(&[[true, true]]);
        let gt = arr2(&[[2.0, 4.0]]);
        assert_eq!(abs_rel(gt.view(), gt.view(), valid.view()).unwrap(), 0.0);
        let pred = arr2(&[[1.0, 5.0]]);
        assert!((abs_rel(pred.view(), gt.view(), valid.view()).unwrap() - 0.375).abs() < 1e-15);
        let scaled = abs_rel((&pred * 3.5).view(), (&gt * 3.5).view(), valid.view()).unwrap();
        assert!((scaled - 0.375).abs() < 1e-15);
        let none = arr2(&[[false, false]]);
        assert!(matches!(abs_rel(pred.view(), gt.view(), none.view()), Err(Error::NoGroundTruth)));
        let zero_gt = arr2(&[[0.0, 4.0]]);
        assert!(abs_rel(pred.view(), zero_gt.view(), valid.view()).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(MatchConfig::default().validate().is_ok());
        let bad = MatchConfig { iou_threshold_2d: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = MatchConfig { n_recall_points: 0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
