use std::path::PathBuf;

use clap::builder::TypedValueParser;
use clap::Args;
use fisheye_bev::bev::records::{write_detections, DetectionRecord, Sensor};
use fisheye_bev::codec::{
    compute_losses, decode as decode_maps, encode_scene, DecodeConfig, GridSpec, LossWeights, MultiBinCodec,
    TargetMaps, TensorFile, DEFAULT_NUM_BINS, DEFAULT_SCORE_THRESHOLD, DEFAULT_TOP_K,
};
use fisheye_bev::geometry::{CameraId, InverseMode};
use fisheye_bev::{Error, Result};

use crate::io::{
    create, finish, load_camera, load_detections, parse_camera, parse_downsample, parse_mode, parse_non_negative,
    parse_unit_interval,
};

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    calib: PathBuf,
    #[arg(long, value_parser = parse_camera)]
    camera: CameraId,
    /// Camera-frame labels (detection interchange lines with `box2d`).
    #[arg(long)]
    labels: PathBuf,
    /// Frame to encode; labels of other frames are ignored.
    #[arg(long, default_value_t = 0)]
    frame: u64,
    /// Output tensor file.
    #[arg(long)]
    out: PathBuf,
    /// Feature-map stride: 4 or 8.
    #[arg(long, default_value_t = 8, value_parser = parse_downsample)]
    downsample: u32,
    /// Number of heading bins.
    #[arg(long, default_value_t = DEFAULT_NUM_BINS, value_parser = clap::value_parser!(u64).range(1..=64).map(|v| v as usize))]
    bins: usize,
}

pub fn encode(a: EncodeArgs) -> Result<()> {
    let camera = load_camera(&a.calib, a.camera)?;
    let codec = MultiBinCodec::new(a.bins)?;
    let grid = GridSpec::for_camera(&camera, a.downsample)?;
    let sensor = Sensor::from(a.camera);
    let mut boxes = Vec::new();
    let mut boxes2d = Vec::new();
    for rec in load_detections(&a.labels)?.into_iter().filter(|r| r.frame == a.frame && r.camera == sensor) {
        let b2 = rec
            .box2d()
            .ok_or_else(|| Error::Format(format!("label in frame {} has no box2d", rec.frame)))?;
        boxes.push(rec.box3d());
        boxes2d.push(b2);
    }
    let outcome = encode_scene(&boxes, &boxes2d, &camera, grid, &codec)?;
    for (i, reason) in &outcome.skipped {
        eprintln!("skipped label {i}: {reason:?}");
    }
    outcome.maps.to_tensor_file().save(&a.out)?;
    println!("encoded {} of {} labels", outcome.maps.num_objects(), boxes.len());
    Ok(())
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    calib: PathBuf,
    #[arg(long, value_parser = parse_camera)]
    camera: CameraId,
    /// Predicted maps (tensor file).
    #[arg(long)]
    maps: PathBuf,
    /// Frame id written to each record.
    #[arg(long, default_value_t = 0)]
    frame: u64,
    /// Output detection lines.
    #[arg(long)]
    out: PathBuf,
    /// Append to `--out` instead of replacing it.
    #[arg(long)]
    append: bool,
    /// Candidates kept per class.
    #[arg(long, default_value_t = DEFAULT_TOP_K)]
    top_k: usize,
    /// Minimum final score.
    #[arg(long, default_value_t = DEFAULT_SCORE_THRESHOLD, value_parser = parse_unit_interval)]
    threshold: f64,
    /// `lut` or `exact`.
    #[arg(long, default_value = "lut", value_parser = parse_mode)]
    mode: InverseMode,
    #[arg(long, default_value_t = DEFAULT_NUM_BINS, value_parser = clap::value_parser!(u64).range(1..=64).map(|v| v as usize))]
    bins: usize,
}

pub fn decode(a: DecodeArgs) -> Result<()> {
    let camera = load_camera(&a.calib, a.camera)?;
    let codec = MultiBinCodec::new(a.bins)?;
    let maps = TargetMaps::from_tensor_file(&TensorFile::load(&a.maps)?)?;
    let config = DecodeConfig {
        top_k: a.top_k,
        score_threshold: a.threshold,
        mode: a.mode,
    };
    let out = decode_maps(&maps, &camera, &codec, &config)?;
    for d in &out.dropped {
        eprintln!("dropped {} at cell {:?}: {}", d.class.as_str(), d.cell, d.reason);
    }
    let records: Vec<DetectionRecord> = out
        .detections
        .iter()
        .map(|d| DetectionRecord::new(a.frame, Sensor::from(a.camera), &d.box3d, Some(&d.box2d)))
        .collect();
    let mut w = create(&a.out, a.append)?;
    write_detections(&mut w, &records)?;
    finish(w)?;
    println!("decoded {} detections", records.len());
    Ok(())
}

#[derive(Debug, Args)]
pub struct LossArgs {
    /// Predicted maps (tensor file).
    #[arg(long)]
    pred: PathBuf,
    /// Target maps (tensor file).
    #[arg(long)]
    target: PathBuf,
    #[arg(long, default_value_t = 1.0, value_parser = parse_non_negative)]
    w_focal: f64,
    #[arg(long, default_value_t = 1.0, value_parser = parse_non_negative)]
    w_offset: f64,
    #[arg(long, default_value_t = 1.0, value_parser = parse_non_negative)]
    w_size2d: f64,
    #[arg(long, default_value_t = 1.0, value_parser = parse_non_negative)]
    w_size3d: f64,
    #[arg(long, default_value_t = 1.0, value_parser = parse_non_negative)]
    w_depth: f64,
    #[arg(long, default_value_t = 1.0, value_parser = parse_non_negative)]
    w_bin: f64,
    #[arg(long, default_value_t = 1.0, value_parser = parse_non_negative)]
    w_residual: f64,
}

pub fn loss(a: LossArgs) -> Result<()> {
    let pred = TargetMaps::from_tensor_file(&TensorFile::load(&a.pred)?)?;
    let target = TargetMaps::from_tensor_file(&TensorFile::load(&a.target)?)?;
    let weights = LossWeights {
        focal: a.w_focal,
        offset: a.w_offset,
        size_2d: a.w_size2d,
        size_3d: a.w_size3d,
        depth_uncertainty: a.w_depth,
        bin_ce: a.w_bin,
        residual: a.w_residual,
    };
    let b = compute_losses(&pred, &target, weights)?;
    println!("focal {}", b.focal);
    println!("offset_l1 {}", b.offset_l1);
    println!("size2d_l1 {}", b.size2d_l1);
    println!("size3d_l1 {}", b.size3d_l1);
    println!("depth_uncertainty {}", b.depth_uncertainty);
    println!("bin_ce {}", b.bin_ce);
    println!("residual_l1 {}", b.residual_l1);
    println!("total {}", b.total);
    Ok(())
}
