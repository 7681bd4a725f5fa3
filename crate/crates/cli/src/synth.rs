use std::path::PathBuf;

use clap::builder::TypedValueParser;
use clap::Args;
use fisheye_bev::bev::records::{write_detections, DetectionRecord, Sensor};
use fisheye_bev::codec::{encode_scene, GridSpec, MultiBinCodec, DEFAULT_NUM_BINS};
use fisheye_bev::eval::VISIBLE_RANGE_M;
use fisheye_bev::synth::{depth_pair, generate, perfect_predictions, NoiseSpec, RigSpec, SceneSpec};
use fisheye_bev::{Error, Result};

use crate::io::{create, finish, parse_downsample, parse_non_negative, parse_positive};

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output directory (created if missing).
    #[arg(long)]
    out_dir: PathBuf,
    /// Seed of frame 0; frame `i` uses `seed + i`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=100_000))]
    frames: u64,
    #[arg(long, default_value_t = 4)]
    min_objects: usize,
    #[arg(long, default_value_t = 12)]
    max_objects: usize,
    /// Largest planar distance of an object from the ego origin (meters, at most 15).
    #[arg(long, default_value_t = 14.0, value_parser = parse_positive)]
    max_range: f64,
    #[arg(long, default_value_t = 8, value_parser = parse_downsample)]
    downsample: u32,
    #[arg(long, default_value_t = DEFAULT_NUM_BINS, value_parser = clap::value_parser!(u64).range(1..=64).map(|v| v as usize))]
    bins: usize,
    /// Gaussian noise on predicted depth (meters), also applied to the depth maps.
    #[arg(long, default_value_t = 0.0, value_parser = parse_non_negative)]
    noise_depth: f64,
    /// Gaussian noise on predicted w, h, l (meters).
    #[arg(long, default_value_t = 0.0, value_parser = parse_non_negative)]
    noise_dims: f64,
    /// Gaussian noise on the predicted 2D offset (grid cells).
    #[arg(long, default_value_t = 0.0, value_parser = parse_non_negative)]
    noise_offset: f64,
    /// Gaussian noise on the predicted heading residual (radians).
    #[arg(long, default_value_t = 0.0, value_parser = parse_non_negative)]
    noise_yaw: f64,
    #[arg(long, default_value_t = 1)]
    noise_seed: u64,
}

/// Writes, per frame `NNNN` and camera `CAM`:
/// `frameNNNN_CAM_targets.fpnt`, `frameNNNN_CAM_pred.fpnt` and
/// `frameNNNN_CAM_depth.fpnt`; plus `rig.json` and `gt.jsonl` (camera
/// labels with 2D boxes followed by ego-frame boxes).
pub fn synth(a: SynthArgs) -> Result<()> {
    if a.min_objects > a.max_objects {
        return Err(Error::InvalidArgument("--min-objects exceeds --max-objects".into()));
    }
    std::fs::create_dir_all(&a.out_dir)?;
    let rig = RigSpec::fixture().build()?;
    rig.save(a.out_dir.join("rig.json"))?;
    let codec = MultiBinCodec::new(a.bins)?;
    let noisy = a.noise_depth > 0.0 || a.noise_dims > 0.0 || a.noise_offset > 0.0 || a.noise_yaw > 0.0;

    let mut gt = Vec::new();
    let mut n_objects = 0;
    for frame in 0..a.frames {
        let spec = SceneSpec {
            seed: a.seed.wrapping_add(frame),
            n_objects: (a.min_objects, a.max_objects),
            max_range: a.max_range,
            snap_downsample: Some(a.downsample),
            ..SceneSpec::default()
        };
        let scene = generate(&spec, &rig)?;
        n_objects += scene.num_objects();
        let noise = noisy.then(|| NoiseSpec {
            seed: a.noise_seed.wrapping_add(frame),
            depth: a.noise_depth,
            dims: a.noise_dims,
            offset: a.noise_offset,
            yaw: a.noise_yaw,
        });
        let preds = perfect_predictions(&scene, &rig, a.downsample, &codec, noise.as_ref())?;
        for (id, camera) in rig.iter() {
            let labels = &scene.labels[&id];
            let grid = GridSpec::for_camera(camera, a.downsample)?;
            for (b, b2) in labels.boxes.iter().zip(&labels.boxes2d) {
                gt.push(DetectionRecord::new(frame, Sensor::from(id), b, Some(b2)));
            }
            let stem = format!("frame{frame:04}_{id}");
            let targets = encode_scene(&labels.boxes, &labels.boxes2d, camera, grid, &codec)?.maps;
            targets.to_tensor_file().save(a.out_dir.join(format!("{stem}_targets.fpnt")))?;
            preds[&id].to_tensor_file().save(a.out_dir.join(format!("{stem}_pred.fpnt")))?;
            depth_pair(camera, grid, VISIBLE_RANGE_M, noise.as_ref())?
                .to_tensor_file()
                .save(a.out_dir.join(format!("{stem}_depth.fpnt")))?;
        }
        gt.extend(scene.objects.iter().map(|b| DetectionRecord::new(frame, Sensor::Ego, b, None)));
    }
    let mut w = create(&a.out_dir.join("gt.jsonl"), false)?;
    write_detections(&mut w, &gt)?;
    finish(w)?;
    println!("wrote {} frames with {n_objects} objects to {}", a.frames, a.out_dir.display());
    Ok(())
}
