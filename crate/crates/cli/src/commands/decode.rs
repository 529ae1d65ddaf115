//! `lseval decode`: turn root/line/displacement tensors into a detections
//! file.

use std::path::{Path, PathBuf};

use clap::Args;

use lseval_core::decode::{decode, DecodeConfig};
use lseval_core::metrics::Detection;
use lseval_core::Error;

use crate::error::{CliError, CliResult};
use crate::lstn::{tensor_to_disp_field, tensor_to_scalar_map, Tensor};
use crate::records;

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Root-point confidence tensor (.lstn).
    #[arg(long)]
    pub root: PathBuf,
    /// Line segmentation tensor (.lstn).
    #[arg(long)]
    pub line: PathBuf,
    /// Displacement field tensor (.lstn).
    #[arg(long)]
    pub disp: PathBuf,
    /// Output detections file (JSON lines).
    #[arg(long)]
    pub out: PathBuf,
    /// Line-map power coefficient.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Minimum filtered confidence for a detection.
    #[arg(long, default_value_t = 0.2)]
    pub thresh: f64,
    /// NMS window side (odd, >= 3).
    #[arg(long, default_value_t = 3)]
    pub nms_window: usize,
    /// Detection count cap.
    #[arg(long, default_value_t = 1000)]
    pub max_detections: usize,
    /// Image id written to the detections file; defaults to the root
    /// tensor's file name up to the first '.'.
    #[arg(long)]
    pub image_id: Option<String>,
}

fn default_image_id(path: &Path) -> String {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".to_string());
    name.split('.').next().unwrap_or("image").to_string()
}

pub fn run(args: &DecodeArgs, quiet: bool) -> CliResult<usize> {
    let root = tensor_to_scalar_map(&Tensor::load(&args.root)?, &args.root)?;
    let line = tensor_to_scalar_map(&Tensor::load(&args.line)?, &args.line)?;
    let disp = tensor_to_disp_field(&Tensor::load(&args.disp)?, &args.disp)?;

    let cfg = DecodeConfig {
        alpha: args.alpha,
        confidence_threshold: args.thresh,
        nms_window: args.nms_window,
        max_detections: args.max_detections,
    };
    let decoded = decode(&root, &line, &disp, &cfg).map_err(|e| match e {
        Error::DimensionMismatch { .. } => CliError::DimensionMismatch(format!(
            "{}, {}, {}: {e}",
            args.root.display(),
            args.line.display(),
            args.disp.display()
        )),
        other => CliError::parse(&args.root, other.to_string()),
    })?;

    let image_id = args
        .image_id
        .clone()
        .unwrap_or_else(|| default_image_id(&args.root));
    let detections: Vec<Detection> = decoded
        .segments
        .iter()
        .map(|segment| Detection {
            image_id: image_id.clone(),
            segment: *segment,
        })
        .collect();
    records::write_detections(&args.out, &detections)?;
    if !quiet {
        println!(
            "decoded {} segments ({} invalid, {} degenerate peaks skipped) -> {}",
            detections.len(),
            decoded.skipped_invalid,
            decoded.skipped_degenerate,
            args.out.display()
        );
    }
    Ok(detections.len())
}
