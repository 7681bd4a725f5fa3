use std::collections::BTreeMap;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fisheye_bev::bev::{fuse_surround, FusionConfig, SurroundFrame};
use fisheye_bev::codec::{decode, encode_scene, DecodeConfig, GridSpec, MultiBinCodec, DEFAULT_NUM_BINS};
use fisheye_bev::geometry::InverseMode;
use fisheye_bev::synth::{generate, perfect_predictions, RigSpec, SceneSpec};

fn codec(c: &mut Criterion) {
    let rig = RigSpec::fixture().build().unwrap();
    let codec = MultiBinCodec::new(DEFAULT_NUM_BINS).unwrap();
    let spec = SceneSpec {
        n_objects: (12, 12),
        ..SceneSpec::with_seed(3)
    };
    let scene = generate(&spec, &rig).unwrap();
    let preds = perfect_predictions(&scene, &rig, 8, &codec, None).unwrap();

    // The camera with the most labels gives the heaviest single-image workload.
    let (id, labels) = scene.labels.iter().max_by_key(|(_, l)| l.boxes.len()).unwrap();
    let cam = rig.get(*id).unwrap();
    let grid = GridSpec::for_camera(cam, 8).unwrap();

    c.bench_function("encode_scene", |b| {
        b.iter(|| encode_scene(black_box(&labels.boxes), &labels.boxes2d, cam, grid, &codec).unwrap())
    });
    for (name, mode) in [("decode_lut", InverseMode::Lut), ("decode_exact", InverseMode::Exact)] {
        let config = DecodeConfig {
            mode,
            ..DecodeConfig::default()
        };
        c.bench_function(name, |b| b.iter(|| decode(black_box(&preds[id]), cam, &codec, &config).unwrap()));
    }

    let mut frame = SurroundFrame::default();
    for (id, maps) in &preds {
        let out = decode(maps, rig.get(*id).unwrap(), &codec, &DecodeConfig::default()).unwrap();
        frame.detections.insert(*id, out.detections.into_iter().map(|d| d.box3d).collect());
    }
    let poses: BTreeMap<_, _> = rig.poses();
    c.bench_function("fuse_surround", |b| {
        b.iter(|| fuse_surround(black_box(&frame), &poses, &FusionConfig::default()).unwrap())
    });
}

criterion_group!(benches, codec);
criterion_main!(benches);
