use std::path::PathBuf;

use clap::builder::TypedValueParser;
use clap::Args;
use fisheye_bev::bev::records::{DetectionRecord, Sensor};
use fisheye_bev::codec::{DepthPair, TensorFile};
use fisheye_bev::eval::{evaluate, EvalInputs, Item2D, Item3D, MatchConfig, VISIBLE_RANGE_M};
use fisheye_bev::geometry::{CameraId, Rig};
use fisheye_bev::{Error, Result};

use crate::io::{load_detections, parse_positive};

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Ground-truth lines: camera-frame labels with `box2d` for the 2D
    /// metrics, ego records (if any) for the 3D/BEV metrics.
    #[arg(long)]
    gt: PathBuf,
    /// Detection lines, same conventions as `--gt`.
    #[arg(long)]
    det: PathBuf,
    /// Calibration, needed when 3D boxes are given in camera frames.
    #[arg(long)]
    calib: Option<PathBuf>,
    /// Depth-map pair tensor files; repeat for several.
    #[arg(long)]
    depth: Vec<PathBuf>,
    #[arg(long, default_value_t = 0.7, value_parser = parse_threshold)]
    iou_2d: f64,
    #[arg(long, default_value_t = 0.5, value_parser = parse_threshold)]
    iou_3d: f64,
    #[arg(long, default_value_t = 40, value_parser = clap::value_parser!(u64).range(1..=1000).map(|v| v as usize))]
    recall_points: usize,
    /// Pool all classes instead of averaging per-class AP.
    #[arg(long)]
    class_agnostic: bool,
    /// Ignore 3D boxes farther than this from the ego origin (meters).
    #[arg(long, default_value_t = VISIBLE_RANGE_M, value_parser = parse_positive)]
    max_range: f64,
    /// Also write the report as JSON here.
    #[arg(long)]
    summary: Option<PathBuf>,
}

fn parse_threshold(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v <= 1.0 => Ok(v),
        _ => Err(format!("IoU threshold must lie in (0, 1], got `{s}`")),
    }
}

fn image_key(frame: u64, id: CameraId) -> u64 {
    frame * CameraId::ALL.len() as u64 + id as u64
}

fn items_2d(records: &[DetectionRecord]) -> Vec<Item2D> {
    records
        .iter()
        .filter_map(|r| {
            let id = r.camera.camera()?;
            Some(Item2D {
                image: image_key(r.frame, id),
                class: r.class,
                score: r.score,
                box2d: r.box2d()?,
            })
        })
        .collect()
}

/// Ego records when the file has any; otherwise camera records moved into
/// the ego frame.
fn items_3d(records: &[DetectionRecord], rig: Option<&Rig>) -> Result<Vec<Item3D>> {
    let ego: Vec<Item3D> = records
        .iter()
        .filter(|r| r.camera == Sensor::Ego)
        .map(|r| Item3D { frame: r.frame, box3d: r.box3d() })
        .collect();
    if !ego.is_empty() {
        return Ok(ego);
    }
    records
        .iter()
        .map(|r| {
            let id = r.camera.camera().expect("non-ego records name a camera");
            let rig = rig.ok_or_else(|| Error::InvalidArgument("camera-frame 3D boxes need --calib".into()))?;
            Ok(Item3D {
                frame: r.frame,
                box3d: r.box3d().to_ego(rig.get(id)?.pose()),
            })
        })
        .collect()
}

pub fn eval(a: EvalArgs) -> Result<()> {
    let config = MatchConfig {
        iou_threshold_2d: a.iou_2d,
        iou_threshold_3d: a.iou_3d,
        n_recall_points: a.recall_points,
        per_class: !a.class_agnostic,
        max_range: a.max_range,
    };
    let rig = a.calib.as_ref().map(Rig::load).transpose()?;
    let gt = load_detections(&a.gt)?;
    let det = load_detections(&a.det)?;
    let pairs = a
        .depth
        .iter()
        .map(|p| DepthPair::from_tensor_file(&TensorFile::load(p)?))
        .collect::<Result<Vec<_>>>()?;
    let inputs = EvalInputs {
        gt_2d: items_2d(&gt),
        det_2d: items_2d(&det),
        gt_3d: items_3d(&gt, rig.as_ref())?,
        det_3d: items_3d(&det, rig.as_ref())?,
        depth: pairs.iter().map(|p| (p.pred.view(), p.gt.view(), p.valid.view())).collect(),
    };
    let report = evaluate(&inputs, &config)?;
    print!("{report}");
    if let Some(path) = &a.summary {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(())
}
