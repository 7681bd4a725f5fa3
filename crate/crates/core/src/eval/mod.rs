//! Detection and depth metrics: axis-aligned, rotated-BEV and upright-3D IoU,
//! KITTI-style AP40 with greedy matching, recall, and absolute relative
//! depth error.

mod ap;
mod iou;
mod report;

pub use ap::{average_precision, interpolated_ap, match_detections, ApResult, Ranked};
pub use iou::{bev_intersection_area, clip_convex, iou_2d, iou_3d, iou_bev, polygon_area};
pub use report::{
    abs_rel, evaluate, ClassMetrics, Counts, EvalInputs, EvalReport, Item2D, Item3D, MatchConfig, VISIBLE_RANGE_M,
};
