use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use clap::Args;
use fisheye_bev::bev::records::read_bev;
use fisheye_bev::bev::BevBox;
use fisheye_bev::synth::EGO_FOOTPRINT;
use fisheye_bev::{Error, Result};
use image::{Rgb, RgbImage};
use imageproc::drawing::{draw_hollow_polygon_mut, draw_line_segment_mut};
use imageproc::point::Point;

use crate::io::parse_positive;

const RED: Rgb<u8> = Rgb([220, 30, 30]);
const BLUE: Rgb<u8> = Rgb([30, 60, 230]);
const GREY: Rgb<u8> = Rgb([150, 150, 150]);
const WHITE: Rgb<u8> = Rgb([255, 255, 255]);

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// BEV lines as written by `fuse`.
    #[arg(long)]
    input: PathBuf,
    /// Output PNG.
    #[arg(long)]
    out: PathBuf,
    /// Draw only this frame (default: every frame in the file).
    #[arg(long)]
    frame: Option<u64>,
    /// Scale, pixels per meter.
    #[arg(long, default_value_t = 50.0, value_parser = parse_positive)]
    px_per_m: f64,
    /// Side of the square canvas in meters, centered on the ego origin.
    #[arg(long, default_value_t = 30.0, value_parser = parse_positive)]
    extent: f64,
}

/// Maps ego `(x, y)` to image coordinates: forward is up, left is left.
struct Canvas {
    half: f64,
    scale: f64,
}

impl Canvas {
    fn to_px(&self, p: [f64; 2]) -> (f32, f32) {
        let col = (self.half - p[1]) * self.scale;
        let row = (self.half - p[0]) * self.scale;
        (col as f32, row as f32)
    }
}

fn draw_box(img: &mut RgbImage, canvas: &Canvas, corners: &[[f64; 2]; 4], outline: Rgb<u8>, heading: Option<Rgb<u8>>) {
    let poly: Vec<Point<f32>> = corners
        .iter()
        .map(|&c| {
            let (x, y) = canvas.to_px(c);
            Point::new(x, y)
        })
        .collect();
    draw_hollow_polygon_mut(img, &poly, outline);
    if let Some(color) = heading {
        // Corners run front-left, rear-left, rear-right, front-right.
        draw_line_segment_mut(img, canvas.to_px(corners[3]), canvas.to_px(corners[0]), color);
    }
}

pub fn render(a: RenderArgs) -> Result<()> {
    let side = (a.extent * a.px_per_m).round();
    if !(1.0..=16384.0).contains(&side) {
        return Err(Error::InvalidArgument(format!("canvas of {side} px per side is out of range")));
    }
    let side = side as u32;
    let records = read_bev(BufReader::new(File::open(&a.input)?))?;
    let canvas = Canvas {
        half: 0.5 * a.extent,
        scale: a.px_per_m,
    };
    let mut img = RgbImage::from_pixel(side, side, WHITE);

    let [x0, x1, y0, y1] = EGO_FOOTPRINT;
    let ego = BevBox {
        x: 0.5 * (x0 + x1),
        y: 0.5 * (y0 + y1),
        l: x1 - x0,
        w: y1 - y0,
        yaw: 0.0,
        class: fisheye_bev::codec::ObjectClass::Car,
        score: 1.0,
        source_camera: None,
    };
    draw_box(&mut img, &canvas, &ego.corners(), GREY, Some(GREY));

    let mut drawn = 0;
    for rec in records.iter().filter(|r| a.frame.is_none_or(|f| f == r.frame)) {
        draw_box(&mut img, &canvas, &rec.bev_box().corners(), RED, Some(BLUE));
        drawn += 1;
    }
    img.save(&a.out)
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    println!("rendered {drawn} boxes to {side}x{side} px");
    Ok(())
}
