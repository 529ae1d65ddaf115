//! Report emission: structured text, PR-curve CSV, and an optional SVG
//! plot. The text report and CSV are byte-deterministic for a given
//! evaluation result; the SVG is presentation only.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use lseval_core::metrics::MetricReport;

use crate::error::{CliError, CliResult};

fn join_numbers(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Renders the structured text report, config echo included.
pub fn render_text(report: &MetricReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "lseval evaluation report");
    let _ = writeln!(out, "========================");
    let _ = writeln!(out, "images: {}", report.image_count);
    let _ = writeln!(out, "ground_truth_segments: {}", report.gt_segment_count);
    let _ = writeln!(out, "detections: {}", report.detection_count);
    let _ = writeln!(out);
    let _ = writeln!(out, "config:");
    let cfg = &report.config;
    let _ = writeln!(out, "  eval_size: {}", cfg.eval_size);
    let _ = writeln!(out, "  virtual_focal: {}", cfg.virtual_focal);
    let _ = writeln!(out, "  eta_theta_deg: {}", cfg.eta_theta_deg);
    let _ = writeln!(out, "  eta_l: {}", cfg.eta_l);
    let _ = writeln!(out, "  sap_thresholds: {}", join_numbers(&cfg.sap_thresholds));
    let _ = writeln!(out, "  lms_tp_threshold: {}", cfg.lms_tp_threshold);
    let _ = writeln!(out, "  pixel_tolerance_ratio: {}", cfg.pixel_tolerance_ratio);
    let _ = writeln!(out);
    let _ = writeln!(out, "metrics:");
    if let Some(pixel) = &report.pixel {
        let _ = writeln!(
            out,
            "  F^H: {:.4} (threshold {:.2}, precision {:.4}, recall {:.4})",
            pixel.best_f, pixel.best_threshold, pixel.best.precision, pixel.best.recall
        );
    }
    for sap in &report.sap {
        let _ = writeln!(out, "  sAP@{}: {:.4}", sap.epsilon, sap.ap_percent);
    }
    if let Some(lap) = &report.lap {
        let _ = writeln!(out, "  LAP: {:.4}", lap.ap_percent);
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "per_image:");
    let _ = writeln!(out, "  image_id gt detections");
    for img in &report.per_image {
        let _ = writeln!(
            out,
            "  {} {} {}",
            img.image_id, img.gt_segments, img.detections
        );
    }
    out
}

/// Renders every PR sweep as one CSV table: metric,threshold,recall,precision.
pub fn render_csv(report: &MetricReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "metric,threshold,recall,precision");
    if let Some(pixel) = &report.pixel {
        for point in &pixel.sweep {
            let _ = writeln!(
                out,
                "pixel,{:.6},{:.6},{:.6}",
                point.threshold, point.score.recall, point.score.precision
            );
        }
    }
    for sap in &report.sap {
        for p in &sap.curve.points {
            let _ = writeln!(
                out,
                "sap@{},{:.6},{:.6},{:.6}",
                sap.epsilon, p.threshold, p.recall, p.precision
            );
        }
    }
    if let Some(lap) = &report.lap {
        for p in &lap.curve.points {
            let _ = writeln!(
                out,
                "lap,{:.6},{:.6},{:.6}",
                p.threshold, p.recall, p.precision
            );
        }
    }
    out
}

/// Renders a minimal recall/precision SVG line plot of the AP curves.
pub fn render_svg(report: &MetricReport) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const MARGIN: f64 = 50.0;
    let plot_w = W - 2.0 * MARGIN;
    let plot_h = H - 2.0 * MARGIN;
    let px = |recall: f64| MARGIN + recall * plot_w;
    let py = |precision: f64| H - MARGIN - precision * plot_h;

    let mut curves: Vec<(String, &[lseval_core::metrics::PrPoint])> = Vec::new();
    for sap in &report.sap {
        curves.push((format!("sAP@{}", sap.epsilon), &sap.curve.points));
    }
    if let Some(lap) = &report.lap {
        curves.push(("LAP".to_string(), &lap.curve.points));
    }

    const COLORS: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{W}" height="{H}" fill="white"/>"#
    );
    // Axes with 0.2 ticks.
    let _ = writeln!(
        out,
        r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="black"/>"#,
        MARGIN,
        H - MARGIN,
        W - MARGIN
    );
    let _ = writeln!(
        out,
        r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/>"#,
        MARGIN,
        H - MARGIN,
        MARGIN
    );
    for i in 0..=5 {
        let v = i as f64 * 0.2;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{:.1}</text>"#,
            px(v),
            H - MARGIN + 18.0,
            v
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="end">{:.1}</text>"#,
            MARGIN - 8.0,
            py(v) + 4.0,
            v
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">recall</text>"#,
        W / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.1})">precision</text>"#,
        H / 2.0,
        H / 2.0
    );
    for (i, (label, points)) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        if !points.is_empty() {
            let path: Vec<String> = points
                .iter()
                .map(|p| format!("{:.2},{:.2}", px(p.recall), py(p.precision)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                path.join(" ")
            );
        }
        let ly = MARGIN + 16.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{0}" y1="{ly:.1}" x2="{1}" y2="{ly:.1}" stroke="{color}" stroke-width="3"/>"#,
            W - MARGIN - 110.0,
            W - MARGIN - 86.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="12">{label}</text>"#,
            W - MARGIN - 80.0,
            ly + 4.0
        );
    }
    let _ = writeln!(out, "</svg>");
    out
}

pub fn write_file(path: &Path, content: &str) -> CliResult<()> {
    fs::write(path, content).map_err(|source| CliError::OutputIo {
        path: path.to_path_buf(),
        source,
    })
}
