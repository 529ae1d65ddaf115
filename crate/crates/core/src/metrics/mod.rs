//! Detector evaluation metrics: pixel F-score, structural AP over endpoint
//! SSE, and line-matching AP built from a camera-model angle score and an
//! overlap score.
//!
//! All scoring happens in "eval coordinates": segments are rescaled per
//! axis so that their image maps onto an `eval_size` x `eval_size` grid.
//! Per-image work is parallelized; reductions run in image order, so
//! results are identical for any worker count.

mod matching;
mod pixel;
mod report;
mod score;

pub use matching::{match_and_ap, MatchCriterion, PRCurve, PrPoint};
pub use pixel::{pixel_fscore, PixelFScore};
pub use report::{
    evaluate, evaluate_selected, ImageCounts, LapReport, MetricReport, MetricSelection,
    PixelMetricReport, PixelSweepPoint, SapReport,
};
pub use score::{lms, rescale_to_eval, score_l, score_theta, sse};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::LineSegment;
use crate::gtmaps::Annotation;

/// Constants of the metric suite. Defaults are the standard evaluation
/// settings; every report echoes the config it was computed with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricConfig {
    /// Side of the square evaluation grid segments are rescaled onto.
    pub eval_size: u32,
    /// Virtual focal length lifting centered endpoints onto the
    /// normalized image plane for the angle score.
    pub virtual_focal: f64,
    /// Angle threshold in degrees; larger normal-vector angles score 0.
    pub eta_theta_deg: f64,
    /// Minimum overlap ratio; both overlap ratios must reach it.
    pub eta_l: f64,
    /// Endpoint-SSE thresholds for structural AP.
    pub sap_thresholds: Vec<f64>,
    /// LMS above this value marks a detection as true positive.
    pub lms_tp_threshold: f64,
    /// Pixel match tolerance as a fraction of the eval-grid diagonal.
    pub pixel_tolerance_ratio: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            eval_size: 128,
            virtual_focal: 24.0,
            eta_theta_deg: 10.0,
            eta_l: 0.5,
            sap_thresholds: vec![5.0, 10.0, 15.0],
            lms_tp_threshold: 0.5,
            pixel_tolerance_ratio: 0.01,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eval_size == 0 {
            return Err(Error::InvalidValue("eval_size must be positive".into()));
        }
        for (name, v) in [
            ("virtual_focal", self.virtual_focal),
            ("eta_theta_deg", self.eta_theta_deg),
            ("pixel_tolerance_ratio", self.pixel_tolerance_ratio),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidValue(format!(
                    "{name} = {v} must be finite and positive"
                )));
            }
        }
        if !self.eta_l.is_finite() || self.eta_l <= 0.0 || self.eta_l > 1.0 {
            return Err(Error::InvalidValue(format!(
                "eta_l = {} outside (0, 1]",
                self.eta_l
            )));
        }
        if !self.lms_tp_threshold.is_finite()
            || self.lms_tp_threshold <= 0.0
            || self.lms_tp_threshold >= 1.0
        {
            return Err(Error::InvalidValue(format!(
                "lms_tp_threshold = {} outside (0, 1)",
                self.lms_tp_threshold
            )));
        }
        if self.sap_thresholds.is_empty() {
            return Err(Error::InvalidValue("sap_thresholds is empty".into()));
        }
        for eps in &self.sap_thresholds {
            if !eps.is_finite() || *eps <= 0.0 {
                return Err(Error::InvalidValue(format!(
                    "sAP threshold {eps} must be finite and positive"
                )));
            }
        }
        Ok(())
    }

    /// Pixel match tolerance in eval pixels: ratio times the diagonal.
    pub fn pixel_tolerance(&self) -> f64 {
        let side = f64::from(self.eval_size);
        self.pixel_tolerance_ratio * (2.0 * side * side).sqrt()
    }
}

/// One detected segment attributed to an image. The detector score lives
/// in the segment's confidence.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub image_id: String,
    pub segment: LineSegment,
}

/// Ground truth keyed by image id. BTreeMap keeps iteration deterministic.
pub type AnnotationSet = BTreeMap<String, Annotation>;

/// Collects annotations into an [`AnnotationSet`], rejecting duplicate ids.
pub fn annotation_set(annotations: Vec<Annotation>) -> Result<AnnotationSet> {
    let mut set = AnnotationSet::new();
    for ann in annotations {
        let id = ann.image_id.clone();
        if set.insert(id.clone(), ann).is_some() {
            return Err(Error::InvalidValue(format!("duplicate image id: {id}")));
        }
    }
    Ok(set)
}
