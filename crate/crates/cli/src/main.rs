//! `fisheye-bev`: command-line front end.
//!
//! Exit status is 0 on success, 1 when the toolkit reports an error (its
//! name is printed on standard error) and 2 for usage errors.

mod codec;
mod evaluate;
mod fusion;
mod geometry;
mod io;
mod render;
mod synth;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "fisheye-bev", version, about = "Fisheye geometry, detection codec, BEV fusion and metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Project a camera-frame (or ego-frame) point to a pixel.
    Project(geometry::ProjectArgs),
    /// Lift a pixel at a given camera depth back to 3D.
    Unproject(geometry::UnprojectArgs),
    /// Build the theta / theta_d lookup table and report its accuracy.
    Lut(geometry::LutArgs),
    /// Rasterize camera-frame labels into target maps.
    Encode(codec::EncodeArgs),
    /// Decode predicted maps into detections.
    Decode(codec::DecodeArgs),
    /// Evaluate the training losses between predicted and target maps.
    Loss(codec::LossArgs),
    /// Fuse per-camera detections into ego-frame BEV boxes.
    Fuse(fusion::FuseArgs),
    /// Score detections and depth maps against ground truth.
    Eval(evaluate::EvalArgs),
    /// Write a synthetic rig, scenes, targets, ideal predictions and depth maps.
    Synth(synth::SynthArgs),
    /// Draw BEV boxes to a PNG image.
    RenderBev(render::RenderArgs),
    /// Time lookup-table against exact inversion of the distortion map.
    Bench(geometry::BenchArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Project(a) => geometry::project(a),
        Command::Unproject(a) => geometry::unproject(a),
        Command::Lut(a) => geometry::lut(a),
        Command::Encode(a) => codec::encode(a),
        Command::Decode(a) => codec::decode(a),
        Command::Loss(a) => codec::loss(a),
        Command::Fuse(a) => fusion::fuse(a),
        Command::Eval(a) => evaluate::eval(a),
        Command::Synth(a) => synth::synth(a),
        Command::RenderBev(a) => render::render(a),
        Command::Bench(a) => geometry::bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(1)
        }
    }
}
