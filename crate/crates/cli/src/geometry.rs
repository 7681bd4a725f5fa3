use std::hint::black_box;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use fisheye_bev::geometry::{
    CamPoint3, CameraId, DistortionCoeffs, DistortionTable, EgoPoint3, InverseMode, Pixel, DEFAULT_LUT_GRIDS,
};
use fisheye_bev::{Error, Result};

use crate::io::{load_camera, parse_camera, parse_finite, parse_mode, parse_positive};

#[derive(Debug, Args)]
pub struct ProjectArgs {
    /// Calibration file.
    #[arg(long)]
    calib: PathBuf,
    /// Camera id: front, left, right or rear.
    #[arg(long, value_parser = parse_camera)]
    camera: CameraId,
    /// Point as `x,y,z` in meters.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_negative_numbers = true, value_parser = parse_finite)]
    point: Vec<f64>,
    /// Interpret the point in the ego frame instead of the camera frame.
    #[arg(long)]
    ego: bool,
}

fn three(v: &[f64], what: &str) -> Result<[f64; 3]> {
    <[f64; 3]>::try_from(v).map_err(|_| Error::InvalidArgument(format!("{what} needs exactly 3 values, got {}", v.len())))
}

pub fn project(a: ProjectArgs) -> Result<()> {
    let [x, y, z] = three(&a.point, "--point")?;
    let camera = load_camera(&a.calib, a.camera)?;
    let p = if a.ego {
        camera.pose().ego_to_cam(EgoPoint3::new(x, y, z))
    } else {
        CamPoint3::new(x, y, z)
    };
    let px = camera.project(p)?;
    println!("{} {}", px.u, px.v);
    Ok(())
}

#[derive(Debug, Args)]
pub struct UnprojectArgs {
    #[arg(long)]
    calib: PathBuf,
    #[arg(long, value_parser = parse_camera)]
    camera: CameraId,
    /// Pixel as `u,v`.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_negative_numbers = true, value_parser = parse_finite)]
    pixel: Vec<f64>,
    /// Camera-frame depth (z) in meters.
    #[arg(long, value_parser = parse_positive)]
    depth: f64,
    /// Inversion of the distortion map: `lut` or `exact`.
    #[arg(long, default_value = "lut", value_parser = parse_mode)]
    mode: InverseMode,
    /// Print the point in the ego frame instead of the camera frame.
    #[arg(long)]
    ego: bool,
}

pub fn unproject(a: UnprojectArgs) -> Result<()> {
    let [u, v] = <[f64; 2]>::try_from(a.pixel.as_slice())
        .map_err(|_| Error::InvalidArgument(format!("--pixel needs exactly 2 values, got {}", a.pixel.len())))?;
    let camera = load_camera(&a.calib, a.camera)?;
    let p = camera.unproject(Pixel::new(u, v), a.depth, a.mode)?;
    if a.ego {
        let e = camera.pose().cam_to_ego(p);
        println!("{} {} {}", e.x, e.y, e.z);
    } else {
        println!("{} {} {}", p.x, p.y, p.z);
    }
    Ok(())
}

/// Distortion coefficients given directly or taken from a calibrated camera.
#[derive(Debug, Args)]
pub struct CoeffArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, value_parser = parse_finite)]
    k1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, value_parser = parse_finite)]
    k2: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, value_parser = parse_finite)]
    k3: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, value_parser = parse_finite)]
    k4: f64,
    /// Take the coefficients of `--camera` from this calibration file instead.
    #[arg(long, requires = "camera", conflicts_with_all = ["k1", "k2", "k3", "k4"])]
    calib: Option<PathBuf>,
    #[arg(long, value_parser = parse_camera, requires = "calib")]
    camera: Option<CameraId>,
}

impl CoeffArgs {
    fn coeffs(&self) -> Result<DistortionCoeffs> {
        match (&self.calib, self.camera) {
            (Some(path), Some(id)) => Ok(*load_camera(path, id)?.distortion()),
            _ => Ok(DistortionCoeffs::new(self.k1, self.k2, self.k3, self.k4)),
        }
    }
}

#[derive(Debug, Args)]
pub struct LutArgs {
    #[command(flatten)]
    coeffs: CoeffArgs,
    /// Number of table nodes.
    #[arg(long, default_value_t = DEFAULT_LUT_GRIDS, value_parser = clap::value_parser!(usize))]
    grids: usize,
    /// Print every node as `theta theta_d` instead of the summary.
    #[arg(long)]
    dump: bool,
}

pub fn lut(a: LutArgs) -> Result<()> {
    let coeffs = a.coeffs.coeffs()?;
    let table = DistortionTable::build(&coeffs, a.grids)?;
    if a.dump {
        let mut out = String::new();
        for (t, td) in table.theta_grid().iter().zip(table.theta_d_grid()) {
            out.push_str(&format!("{t} {td}\n"));
        }
        print!("{out}");
        return Ok(());
    }
    let n = 10_000;
    let mut worst = 0.0f64;
    for i in 0..=n {
        let td = table.max_theta_d() * i as f64 / n as f64;
        let err = (table.theta_from_theta_d(td)? - coeffs.theta_from_theta_d_exact(td)?).abs();
        worst = worst.max(err);
    }
    println!("grids {}", table.n_grids());
    println!("max_theta_d {}", table.max_theta_d());
    println!("max_inverse_error_rad {worst:e}");
    Ok(())
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    coeffs: CoeffArgs,
    /// Inversions per mode.
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, default_value_t = DEFAULT_LUT_GRIDS)]
    grids: usize,
}

fn time_per_op(queries: &[f64], f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let start = Instant::now();
    let mut acc = 0.0;
    for &q in queries {
        acc += f(black_box(q))?;
    }
    black_box(acc);
    Ok(start.elapsed().as_nanos() as f64 / queries.len() as f64)
}

pub fn bench(a: BenchArgs) -> Result<()> {
    let coeffs = a.coeffs.coeffs()?;
    let table = DistortionTable::build(&coeffs, a.grids)?;
    let max = table.max_theta_d();
    // Evenly spread queries in a scrambled order so branch prediction gets no help.
    let n = a.n as usize;
    let queries: Vec<f64> = (0..n).map(|i| max * ((i * 7919) % n) as f64 / n as f64).collect();
    let lut_ns = time_per_op(&queries, |q| table.theta_from_theta_d(q))?;
    let exact_ns = time_per_op(&queries, |q| coeffs.theta_from_theta_d_exact(q))?;
    println!("inversions {n}");
    println!("lut_ns_per_op {lut_ns:.2}");
    println!("exact_ns_per_op {exact_ns:.2}");
    println!("speedup {:.2}", exact_ns / lut_ns);
    Ok(())
}
