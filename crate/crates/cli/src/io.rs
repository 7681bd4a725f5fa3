//! Shared argument parsers and file helpers.

use std::fs::{File, OpenOptions};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use fisheye_bev::bev::records::{read_detections, DetectionRecord};
use fisheye_bev::geometry::{CameraId, CameraModel, InverseMode, Rig};
use fisheye_bev::Result;

pub fn parse_camera(s: &str) -> std::result::Result<CameraId, String> {
    s.parse().map_err(|e: fisheye_bev::Error| e.to_string())
}

pub fn parse_mode(s: &str) -> std::result::Result<InverseMode, String> {
    s.parse().map_err(|e: fisheye_bev::Error| e.to_string())
}

pub fn parse_downsample(s: &str) -> std::result::Result<u32, String> {
    match s.parse::<u32>() {
        Ok(v @ (4 | 8)) => Ok(v),
        _ => Err(format!("downsample must be 4 or 8, got `{s}`")),
    }
}

pub fn parse_unit_interval(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if (0.0..=1.0).contains(&v) => Ok(v),
        _ => Err(format!("expected a number in [0, 1], got `{s}`")),
    }
}

pub fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

pub fn parse_non_negative(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a non-negative number, got `{s}`")),
    }
}

pub fn parse_finite(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("expected a finite number, got `{s}`")),
    }
}

pub fn load_camera(calib: &Path, id: CameraId) -> Result<CameraModel> {
    Rig::load(calib)?.get(id).cloned()
}

pub fn load_detections(path: &Path) -> Result<Vec<DetectionRecord>> {
    read_detections(BufReader::new(File::open(path)?))
}

/// Buffered writer that truncates, or appends when `append` is set.
pub fn create(path: &Path, append: bool) -> Result<BufWriter<File>> {
    let file = if append {
        OpenOptions::new().create(true).append(true).open(path)?
    } else {
        File::create(path)?
    };
    Ok(BufWriter::new(file))
}

pub fn finish(mut w: impl Write) -> Result<()> {
    w.flush()?;
    Ok(())
}
