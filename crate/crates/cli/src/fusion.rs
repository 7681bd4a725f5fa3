use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use fisheye_bev::bev::records::{write_bev, BevRecord};
use fisheye_bev::bev::{fuse_surround, FusionConfig, SurroundFrame};
use fisheye_bev::geometry::Rig;
use fisheye_bev::{Error, Result};

use crate::io::{create, finish, load_detections, parse_non_negative, parse_unit_interval};

#[derive(Debug, Args)]
pub struct FuseArgs {
    #[arg(long)]
    calib: PathBuf,
    /// Camera-frame detection files; repeat the flag for several files.
    #[arg(long, required = true)]
    input: Vec<PathBuf>,
    /// Output BEV lines.
    #[arg(long)]
    out: PathBuf,
    /// Suppress same-class boxes whose BEV IoU exceeds this.
    #[arg(long, default_value_t = 0.3, value_parser = parse_unit_interval)]
    iou: f64,
    /// Suppress same-class boxes whose centers are closer than this (meters).
    #[arg(long, default_value_t = 0.5, value_parser = parse_non_negative)]
    center_dist: f64,
}

pub fn fuse(a: FuseArgs) -> Result<()> {
    let rig = Rig::load(&a.calib)?;
    let mut frames: BTreeMap<u64, SurroundFrame> = BTreeMap::new();
    for path in &a.input {
        for rec in load_detections(path)? {
            let id = rec.camera.camera().ok_or_else(|| {
                Error::Format(format!("{}: fusion input must be camera-frame records", path.display()))
            })?;
            let frame = frames.entry(rec.frame).or_insert_with(|| SurroundFrame {
                frame_id: rec.frame,
                ..Default::default()
            });
            frame.detections.entry(id).or_default().push(rec.box3d());
        }
    }
    let config = FusionConfig {
        iou_threshold: a.iou,
        center_dist_threshold: a.center_dist,
    };
    let poses = rig.poses();
    let mut records = Vec::new();
    for (id, frame) in &frames {
        records.extend(fuse_surround(frame, &poses, &config)?.iter().map(|b| BevRecord::new(*id, b)));
    }
    let mut w = create(&a.out, false)?;
    write_bev(&mut w, &records)?;
    finish(w)?;
    println!("fused {} frames into {} boxes", frames.len(), records.len());
    Ok(())
}
