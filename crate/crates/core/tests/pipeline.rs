//! End-to-end paths through several modules.

use fisheye_bev::bev::records::{read_detections, write_detections, DetectionRecord, Sensor};
use fisheye_bev::codec::{
    compute_losses, decode, Box3D, DecodeConfig, Frame, LossWeights, MultiBinCodec, ObjectClass, TargetMaps,
    TensorFile,
};
use fisheye_bev::eval::{evaluate, EvalInputs, Item2D, Item3D, MatchConfig};
use fisheye_bev::geometry::{CameraId, InverseMode, Rig};
use fisheye_bev::synth::{corner_rectangle, generate, perfect_predictions, NoiseSpec, RigSpec, SceneSpec};

fn rig() -> Rig {
    RigSpec::fixture().build().unwrap()
}

fn eval_inputs(rig: &Rig, seeds: std::ops::Range<u64>, noise: Option<NoiseSpec>) -> (Vec<Item2D>, Vec<Item2D>, Vec<Item3D>, Vec<Item3D>) {
    let codec = MultiBinCodec::new(2).unwrap();
    let (mut g2, mut d2, mut g3, mut d3) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for seed in seeds {
        let scene = generate(&SceneSpec::with_seed(seed), rig).unwrap();
        g3.extend(scene.objects.iter().map(|&box3d| Item3D { frame: seed, box3d }));
        let noise = noise.map(|n| NoiseSpec { seed: n.seed ^ seed, ..n });
        let preds = perfect_predictions(&scene, rig, 8, &codec, noise.as_ref()).unwrap();
        for (id, labels) in &scene.labels {
            let image = seed * 4 + *id as u64;
            let camera = rig.get(*id).unwrap();
            for (b, b2) in labels.boxes.iter().zip(&labels.boxes2d) {
                g2.push(Item2D { image, class: b.class, score: 1.0, box2d: *b2 });
            }
            for d in decode(&preds[id], camera, &codec, &DecodeConfig::default()).unwrap().detections {
                d2.push(Item2D { image, class: d.box3d.class, score: d.box3d.score, box2d: d.box2d });
                d3.push(Item3D { frame: seed, box3d: d.box3d.to_ego(camera.pose()) });
            }
        }
    }
    (g2, d2, g3, d3)
}

#[test]
fn depth_noise_lowers_ap_3d() {
    let rig = rig();
    let config = MatchConfig::default();
    let run = |noise| {
        let (gt_2d, det_2d, gt_3d, det_3d) = eval_inputs(&rig, 0..30, noise);
        evaluate(&EvalInputs { gt_2d, det_2d, gt_3d, det_3d, depth: vec![] }, &config).unwrap()
    };
    let clean = run(None);
    let noisy = run(Some(NoiseSpec::depth_only(11, 0.5)));
    assert_eq!(clean.ap_3d, Some(100.0));
    assert!(noisy.ap_3d.unwrap() < clean.ap_3d.unwrap());
    assert!(noisy.ap_bev.unwrap() < 100.0);
    // Depth noise leaves the 2D path untouched.
    assert_eq!(noisy.ap_2d, Some(100.0));
}

#[test]
fn class_agnostic_mode_on_perfect_predictions() {
    let rig = rig();
    let (gt_2d, det_2d, gt_3d, det_3d) = eval_inputs(&rig, 0..10, None);
    let config = MatchConfig { per_class: false, ..MatchConfig::default() };
    let report = evaluate(&EvalInputs { gt_2d, det_2d, gt_3d, det_3d, depth: vec![] }, &config).unwrap();
    assert!(report.per_class.is_empty());
    assert_eq!(report.ap_3d, Some(100.0));
    assert_eq!(report.counts_3d.fp, 0);
    let text = report.to_string();
    assert!(text.contains("100.00"));
}

#[test]
fn tensor_file_preserves_decodable_maps() {
    let rig = rig();
    let codec = MultiBinCodec::new(2).unwrap();
    let scene = generate(&SceneSpec::with_seed(5), &rig).unwrap();
    let preds = perfect_predictions(&scene, &rig, 8, &codec, None).unwrap();
    for (id, maps) in &preds {
        let bytes = maps.to_tensor_file().to_bytes();
        let back = TargetMaps::from_tensor_file(&TensorFile::from_bytes(&bytes).unwrap()).unwrap();
        let camera = rig.get(*id).unwrap();
        let a = decode(maps, camera, &codec, &DecodeConfig::default()).unwrap();
        let b = decode(&back, camera, &codec, &DecodeConfig::default()).unwrap();
        assert_eq!(a.detections.len(), b.detections.len());
        for (x, y) in a.detections.iter().zip(&b.detections) {
            // Storage is single precision.
            assert_eq!(x.cell, y.cell);
            assert!(x.box3d.cam_center().distance(&y.box3d.cam_center()) < 1e-4);
        }
    }
}

#[test]
fn losses_vanish_for_matching_regressions() {
    let rig = rig();
    let codec = MultiBinCodec::new(2).unwrap();
    let scene = generate(&SceneSpec::with_seed(2), &rig).unwrap();
    let targets = perfect_predictions(&scene, &rig, 8, &codec, None).unwrap();
    let noisy = perfect_predictions(
        &scene,
        &rig,
        8,
        &codec,
        Some(&NoiseSpec { seed: 1, depth: 0.3, dims: 0.1, offset: 0.2, yaw: 0.0 }),
    )
    .unwrap();
    for (id, t) in &targets {
        if t.num_objects() == 0 {
            continue;
        }
        let mut target = t.clone();
        target.log_sigma.fill(0.0);
        let mut pred = t.clone();
        pred.log_sigma.fill(0.0);
        let same = compute_losses(&pred, &target, LossWeights::default()).unwrap();
        assert_eq!(same.offset_l1 + same.size2d_l1 + same.size3d_l1 + same.residual_l1, 0.0);
        let mut worse = noisy[id].clone();
        worse.log_sigma.fill(0.0);
        let off = compute_losses(&worse, &target, LossWeights::default()).unwrap();
        assert!(off.size3d_l1 > 0.0 && off.depth_uncertainty > same.depth_uncertainty);
        assert!(off.total > same.total);
    }
}

#[test]
fn known_car_label_matches_corner_projection() {
    let rig = rig();
    let camera = rig.get(CameraId::Front).unwrap();
    let car = Box3D {
        frame: Frame::Ego,
        center: [6.0, 0.5, 0.75],
        w: 1.8,
        h: 1.5,
        l: 4.5,
        yaw: 0.4,
        class: ObjectClass::Car,
        score: 1.0,
        sigma: 0.0,
    };
    let rect = corner_rectangle(&car, camera).unwrap();
    let pose = camera.pose();
    let pts: Vec<_> = car.ego_corners().iter().map(|&c| camera.project(pose.ego_to_cam(c)).unwrap()).collect();
    let min_u = pts.iter().map(|p| p.u).fold(f64::INFINITY, f64::min);
    let max_v = pts.iter().map(|p| p.v).fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(rect.min_u(), min_u);
    assert!((rect.max_v() - max_v).abs() < 1e-9);
}

#[test]
fn decoded_boxes_survive_the_interchange_format() {
    let rig = rig();
    let codec = MultiBinCodec::new(2).unwrap();
    let scene = generate(&SceneSpec::with_seed(9), &rig).unwrap();
    let preds = perfect_predictions(&scene, &rig, 8, &codec, None).unwrap();
    let mut records = Vec::new();
    for (id, maps) in &preds {
        let camera = rig.get(*id).unwrap();
        let config = DecodeConfig { mode: InverseMode::Exact, ..DecodeConfig::default() };
        for d in decode(maps, camera, &codec, &config).unwrap().detections {
            records.push(DetectionRecord::new(9, Sensor::from(*id), &d.box3d, Some(&d.box2d)));
        }
    }
    assert_eq!(records.len(), scene.num_objects());
    let mut buf = Vec::new();
    write_detections(&mut buf, &records).unwrap();
    assert_eq!(read_detections(buf.as_slice()).unwrap(), records);
}
