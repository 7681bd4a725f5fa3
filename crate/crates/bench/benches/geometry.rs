use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use fisheye_bev::geometry::{CamPoint3, DistortionTable, InverseMode, Pixel, DEFAULT_LUT_GRIDS};
use fisheye_bev::synth::RigSpec;

/// Distorted angles spread over the whole table range.
fn sweep(max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| max * (i as f64 + 0.5) / n as f64).collect()
}

fn inversion(c: &mut Criterion) {
    let spec = RigSpec::fixture();
    let coeffs = spec.distortion;
    let table = DistortionTable::build(&coeffs, DEFAULT_LUT_GRIDS).unwrap();
    let thetas = sweep(table.max_theta_d(), 1024);

    let mut g = c.benchmark_group("theta_inverse");
    g.throughput(Throughput::Elements(thetas.len() as u64));
    g.bench_function("lut", |b| {
        b.iter(|| thetas.iter().map(|&t| table.theta_from_theta_d(black_box(t)).unwrap()).sum::<f64>())
    });
    g.bench_function("exact", |b| {
        b.iter(|| thetas.iter().map(|&t| coeffs.theta_from_theta_d_exact(black_box(t)).unwrap()).sum::<f64>())
    });
    g.finish();

    let mut g = c.benchmark_group("lut_build");
    for n in [225, 900, 3600] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| DistortionTable::build(black_box(&coeffs), n).unwrap())
        });
    }
    g.finish();
}

fn projection(c: &mut Criterion) {
    let rig = spec_rig();
    let cam = rig.iter().next().unwrap().1;
    let points: Vec<CamPoint3> = (0..1024)
        .map(|i| {
            let a = i as f64 * 0.37;
            CamPoint3::new(4.0 * a.cos(), 2.0 * a.sin(), 2.0 + (i % 13) as f64)
        })
        .collect();
    let pixels: Vec<Pixel> = points.iter().map(|&p| cam.project(p).unwrap()).collect();

    let mut g = c.benchmark_group("camera");
    g.throughput(Throughput::Elements(points.len() as u64));
    g.bench_function("project", |b| {
        b.iter(|| points.iter().map(|&p| cam.project(black_box(p)).unwrap().u).sum::<f64>())
    });
    for (name, mode) in [("unproject_lut", InverseMode::Lut), ("unproject_exact", InverseMode::Exact)] {
        g.bench_function(name, |b| {
            b.iter(|| {
                pixels
                    .iter()
                    .zip(&points)
                    .map(|(&px, p)| cam.unproject(black_box(px), p.z, mode).unwrap().x)
                    .sum::<f64>()
            })
        });
    }
    g.finish();
}

fn spec_rig() -> fisheye_bev::geometry::Rig {
    RigSpec::fixture().build().unwrap()
}

criterion_group!(benches, inversion, projection);
criterion_main!(benches);
