//! `lseval gtmaps`: build ground-truth tensors from an annotation file.

use std::path::PathBuf;

use clap::Args;

use lseval_core::gtmaps::build_gt_bundle;

use crate::error::{CliError, CliResult};
use crate::lstn::{disp_field_to_tensor, scalar_map_to_tensor};
use crate::records;

#[derive(Debug, Args)]
pub struct GtmapsArgs {
    /// Ground-truth annotations (JSON lines).
    #[arg(long)]
    pub gt: PathBuf,
    /// Output directory for {image_id}.{root,line,disp}.lstn files.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Square output resolution; defaults to each annotation's own size.
    #[arg(long)]
    pub size: Option<usize>,
    /// Gaussian sigma for the root map.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
}

pub fn run(args: &GtmapsArgs, quiet: bool) -> CliResult<usize> {
    if args.sigma <= 0.0 || !args.sigma.is_finite() {
        return Err(CliError::parse(
            "<sigma>",
            format!("sigma {} must be positive", args.sigma),
        ));
    }
    let annotations = records::read_annotations(&args.gt)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|source| CliError::OutputIo {
        path: args.out_dir.clone(),
        source,
    })?;
    for ann in &annotations {
        if ann.image_id.contains(['/', '\\']) || ann.image_id.contains("..") {
            return Err(CliError::parse(
                &args.gt,
                format!("image id {:?} is not usable as a file name", ann.image_id),
            ));
        }
        let (out_w, out_h) = match args.size {
            Some(s) => (s, s),
            None => (ann.width as usize, ann.height as usize),
        };
        let bundle = build_gt_bundle(ann, out_w, out_h, args.sigma);
        let file = |kind: &str| args.out_dir.join(format!("{}.{kind}.lstn", ann.image_id));
        scalar_map_to_tensor(&bundle.root).save(&file("root"))?;
        scalar_map_to_tensor(&bundle.line).save(&file("line"))?;
        disp_field_to_tensor(&bundle.disp).save(&file("disp"))?;
    }
    if !quiet {
        println!(
            "wrote {} tensor triples to {}",
            annotations.len(),
            args.out_dir.display()
        );
    }
    Ok(annotations.len())
}
