//! `lseval eval`: score a detections file against ground truth and write
//! the report, PR-curve CSV, and optional SVG plot.

use std::path::{Path, PathBuf};

use clap::Args;

use lseval_core::metrics::{annotation_set, evaluate_selected, MetricReport, MetricSelection};
use lseval_core::Error;

use crate::error::{CliError, CliResult};
use crate::records;
use crate::report;

use super::{load_metric_config, resolve_jobs, with_pool};

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Ground-truth annotations (JSON lines).
    #[arg(long)]
    pub gt: PathBuf,
    /// Detections (JSON lines).
    #[arg(long)]
    pub pred: PathBuf,
    /// Output directory for report.txt, pr_curves.csv, pr_curves.svg.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Comma-separated subset of fh,sap,lap (default: all).
    #[arg(long, value_delimiter = ',')]
    pub metrics: Vec<String>,
    /// Override the configured SSE thresholds for structural AP.
    #[arg(long, value_delimiter = ',')]
    pub sap_thresholds: Vec<f64>,
    /// Also write an SVG plot of the PR curves.
    #[arg(long)]
    pub svg: bool,
}

fn parse_selection(metrics: &[String]) -> CliResult<MetricSelection> {
    if metrics.is_empty() {
        return Ok(MetricSelection::default());
    }
    let mut sel = MetricSelection {
        pixel: false,
        sap: false,
        lap: false,
    };
    for m in metrics {
        match m.trim().to_ascii_lowercase().as_str() {
            "fh" | "pixel" => sel.pixel = true,
            "sap" => sel.sap = true,
            "lap" => sel.lap = true,
            other => {
                return Err(CliError::parse(
                    "<metrics>",
                    format!("unknown metric {other:?}; expected fh, sap, or lap"),
                ))
            }
        }
    }
    Ok(sel)
}

pub fn run(
    args: &EvalArgs,
    jobs: Option<usize>,
    config: Option<&Path>,
    quiet: bool,
) -> CliResult<MetricReport> {
    let annotations = records::read_annotations(&args.gt)?;
    let gts = annotation_set(annotations)
        .map_err(|e| CliError::parse(&args.gt, e.to_string()))?;
    let dets = records::read_detections(&args.pred)?;

    let mut cfg = load_metric_config(config)?;
    if !args.sap_thresholds.is_empty() {
        cfg.sap_thresholds = args.sap_thresholds.clone();
    }
    cfg.validate()
        .map_err(|e| CliError::parse("<config>", e.to_string()))?;
    let selection = parse_selection(&args.metrics)?;

    let jobs = resolve_jobs(jobs);
    let result = with_pool(jobs, || evaluate_selected(&dets, &gts, &cfg, selection))?;
    let report_data = result.map_err(|e| match e {
        Error::UnknownImage(id) => CliError::ImageIdMismatch(format!(
            "detections reference image {id:?} absent from {}",
            args.gt.display()
        )),
        other => CliError::parse(&args.pred, other.to_string()),
    })?;

    std::fs::create_dir_all(&args.out_dir).map_err(|source| CliError::OutputIo {
        path: args.out_dir.clone(),
        source,
    })?;
    let report_path = args.out_dir.join("report.txt");
    report::write_file(&report_path, &report::render_text(&report_data))?;
    report::write_file(
        &args.out_dir.join("pr_curves.csv"),
        &report::render_csv(&report_data),
    )?;
    if args.svg {
        report::write_file(
            &args.out_dir.join("pr_curves.svg"),
            &report::render_svg(&report_data),
        )?;
    }
    if !quiet {
        print!("{}", report::render_text(&report_data));
        println!("report written to {}", report_path.display());
    }
    Ok(report_data)
}
