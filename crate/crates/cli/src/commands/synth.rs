//! `lseval synth`: generate seeded synthetic scenes and perturbed
//! detections.

use std::path::PathBuf;

use clap::Args;

use lseval_core::gtmaps::Annotation;
use lseval_core::metrics::Detection;
use lseval_core::synth::{generate_scene, perturb, stream, PerturbSpec};

use crate::error::{CliError, CliResult};
use crate::records;

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Segments per image.
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    /// Image width in pixels.
    #[arg(long, default_value_t = 320)]
    pub width: u32,
    /// Image height in pixels.
    #[arg(long, default_value_t = 320)]
    pub height: u32,
    /// Base seed; per-image seeds derive from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of images.
    #[arg(long, default_value_t = 1)]
    pub images: usize,
    /// Perturbation as comma-separated key=value pairs:
    /// `rotate=<deg>`, `scale=<factor>`, `tx=<px>`, `ty=<px>`,
    /// `split=<n>`, `conf=<score>`, `seed=<u64>`. Omitted keys keep
    /// identity defaults.
    #[arg(long)]
    pub perturb: Option<String>,
    /// Output directory for gt.jsonl and pred.jsonl.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

pub fn parse_perturb_spec(text: &str) -> Result<PerturbSpec, String> {
    let mut spec = PerturbSpec::default();
    for pair in text.split(',').filter(|p| !p.trim().is_empty()) {
        let Some((key, value)) = pair.split_once('=') else {
            return Err(format!("expected key=value, got {pair:?}"));
        };
        let key = key.trim();
        let value = value.trim();
        let bad = |e: &dyn std::fmt::Display| format!("{key}={value}: {e}");
        match key {
            "rotate" => spec.rotate_deg = value.parse().map_err(|e| bad(&e))?,
            "scale" => spec.length_scale = value.parse().map_err(|e| bad(&e))?,
            "tx" => spec.translate[0] = value.parse().map_err(|e| bad(&e))?,
            "ty" => spec.translate[1] = value.parse().map_err(|e| bad(&e))?,
            "split" => spec.split_count = value.parse().map_err(|e| bad(&e))?,
            "conf" => spec.confidence = value.parse().map_err(|e| bad(&e))?,
            "seed" => spec.seed = value.parse().map_err(|e| bad(&e))?,
            other => return Err(format!("unknown perturbation key {other:?}")),
        }
    }
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

pub fn run(args: &SynthArgs, quiet: bool) -> CliResult<(usize, usize)> {
    let spec = match &args.perturb {
        Some(text) => {
            parse_perturb_spec(text).map_err(|m| CliError::parse("<perturb>", m))?
        }
        None => PerturbSpec::default(),
    };

    let mut annotations: Vec<Annotation> = Vec::with_capacity(args.images);
    let mut detections: Vec<Detection> = Vec::new();
    for i in 0..args.images {
        let image_seed = stream(args.seed, i as u64).next_u64();
        let mut ann = generate_scene(args.n, args.width, args.height, image_seed);
        ann.image_id = format!("scene-{i:04}");
        let dets =
            perturb(&ann, &spec).map_err(|e| CliError::parse("<perturb>", e.to_string()))?;
        detections.extend(dets);
        annotations.push(ann);
    }

    std::fs::create_dir_all(&args.out_dir).map_err(|source| CliError::OutputIo {
        path: args.out_dir.clone(),
        source,
    })?;
    let gt_path = args.out_dir.join("gt.jsonl");
    let pred_path = args.out_dir.join("pred.jsonl");
    records::write_annotations(&gt_path, &annotations)?;
    records::write_detections(&pred_path, &detections)?;
    if !quiet {
        println!(
            "wrote {} images ({} segments) to {} and {} detections to {}",
            annotations.len(),
            annotations.iter().map(|a| a.segments.len()).sum::<usize>(),
            gt_path.display(),
            detections.len(),
            pred_path.display()
        );
    }
    Ok((annotations.len(), detections.len()))
}
