//! Aggregated evaluation: the pixel-F sweep, structural AP at each
//! threshold, and line-matching AP, folded into one serializable report.

use serde::Serialize;

use super::matching::{match_and_ap, MatchCriterion, PRCurve};
use super::pixel::{pixel_fscore, PixelFScore};
use super::{AnnotationSet, Detection, MetricConfig};
use crate::error::Result;

/// Which metric families to compute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricSelection {
    pub pixel: bool,
    pub sap: bool,
    pub lap: bool,
}

impl Default for MetricSelection {
    fn default() -> Self {
        Self {
            pixel: true,
            sap: true,
            lap: true,
        }
    }
}

/// One point of the pixel-F confidence sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PixelSweepPoint {
    pub threshold: f64,
    pub score: PixelFScore,
}

/// Best pixel F over the confidence sweep, with the full sweep attached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PixelMetricReport {
    pub best_f: f64,
    pub best_threshold: f64,
    pub best: PixelFScore,
    pub sweep: Vec<PixelSweepPoint>,
}

/// Structural AP at one SSE threshold, in percent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SapReport {
    pub epsilon: f64,
    pub ap_percent: f64,
    pub curve: PRCurve,
}

/// Line-matching AP in percent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LapReport {
    pub tp_threshold: f64,
    pub ap_percent: f64,
    pub curve: PRCurve,
}

/// Per-image dataset breakdown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImageCounts {
    pub image_id: String,
    pub gt_segments: usize,
    pub detections: usize,
}

/// Full evaluation output. Deselected metric families are `None`/empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub config: MetricConfig,
    pub image_count: usize,
    pub gt_segment_count: usize,
    pub detection_count: usize,
    pub pixel: Option<PixelMetricReport>,
    pub sap: Vec<SapReport>,
    pub lap: Option<LapReport>,
    pub per_image: Vec<ImageCounts>,
}

/// Confidence thresholds swept for the pixel F-score, in steps of 0.05.
fn pixel_sweep_thresholds() -> Vec<f64> {
    (0..=20).map(|i| i as f64 * 0.05).collect()
}

/// Runs every metric family.
pub fn evaluate(
    dets: &[Detection],
    gts: &AnnotationSet,
    cfg: &MetricConfig,
) -> Result<MetricReport> {
    evaluate_selected(dets, gts, cfg, MetricSelection::default())
}

/// Runs the selected metric families and assembles the report.
pub fn evaluate_selected(
    dets: &[Detection],
    gts: &AnnotationSet,
    cfg: &MetricConfig,
    selection: MetricSelection,
) -> Result<MetricReport> {
    cfg.validate()?;

    let per_image: Vec<ImageCounts> = gts
        .iter()
        .map(|(id, ann)| ImageCounts {
            image_id: id.clone(),
            gt_segments: ann.segments.len(),
            detections: dets.iter().filter(|d| &d.image_id == id).count(),
        })
        .collect();

    let pixel = if selection.pixel {
        Some(pixel_sweep(dets, gts, cfg)?)
    } else {
        None
    };

    let mut sap = Vec::new();
    if selection.sap {
        for &epsilon in &cfg.sap_thresholds {
            let curve = match_and_ap(dets, gts, &MatchCriterion::Sse { max_sse: epsilon }, cfg)?;
            sap.push(SapReport {
                epsilon,
                ap_percent: curve.ap * 100.0,
                curve,
            });
        }
    }

    let lap = if selection.lap {
        let curve = match_and_ap(
            dets,
            gts,
            &MatchCriterion::Lms {
                min_score: cfg.lms_tp_threshold,
            },
            cfg,
        )?;
        Some(LapReport {
            tp_threshold: cfg.lms_tp_threshold,
            ap_percent: curve.ap * 100.0,
            curve,
        })
    } else {
        None
    };

    Ok(MetricReport {
        config: cfg.clone(),
        image_count: gts.len(),
        gt_segment_count: gts.values().map(|a| a.segments.len()).sum(),
        detection_count: dets.len(),
        pixel,
        sap,
        lap,
        per_image,
    })
}

fn pixel_sweep(
    dets: &[Detection],
    gts: &AnnotationSet,
    cfg: &MetricConfig,
) -> Result<PixelMetricReport> {
    let thresholds = pixel_sweep_thresholds();
    // Thresholds that admit the same detection count admit the same
    // detection set, so their scores are shared instead of recomputed.
    let mut cache: Vec<(usize, PixelFScore)> = Vec::new();
    let mut sweep = Vec::with_capacity(thresholds.len());
    for t in thresholds {
        let included = dets
            .iter()
            .filter(|d| d.segment.confidence() >= t)
            .count();
        let score = match cache.iter().find(|(n, _)| *n == included) {
            Some((_, s)) => *s,
            None => {
                let s = pixel_fscore(dets, gts, cfg, t)?;
                cache.push((included, s));
                s
            }
        };
        sweep.push(PixelSweepPoint {
            threshold: t,
            score,
        });
    }
    // Lowest threshold wins ties, so scan in sweep order.
    let best = sweep
        .iter()
        .copied()
        .max_by(|a, b| {
            a.score
                .f
                .total_cmp(&b.score.f)
                .then_with(|| b.threshold.total_cmp(&a.threshold))
        })
        .expect("sweep is never empty");
    Ok(PixelMetricReport {
        best_f: best.score.f,
        best_threshold: best.threshold,
        best: best.score,
        sweep,
    })
}
