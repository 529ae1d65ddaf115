//! Ground-truth map construction from segment annotations, and the
//! training losses evaluated over those maps.
//!
//! Each segment contributes a Gaussian bump (peak 1) at its midpoint pixel
//! to the root map, displacement vectors over a 5x5 window around that
//! pixel, and a rasterized trace to the line map.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{LineSegment, Point2};
use crate::map::{DisplacementField, ScalarMap};
use crate::raster::bresenham;

/// Half-width of the 5x5 windows used for the root Gaussian and the
/// displacement supervision, in output pixels.
pub const SUPERVISION_WINDOW_RADIUS: usize = 2;

/// Clamp applied to predicted probabilities inside the cross-entropy.
pub const BCE_EPS: f64 = 1e-6;

/// Segment annotations for one image.
#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    pub segments: Vec<LineSegment>,
}

impl Annotation {
    /// Validates that dimensions are positive and every endpoint lies
    /// within `[0, width] x [0, height]`.
    pub fn new(
        image_id: String,
        width: u32,
        height: u32,
        segments: Vec<LineSegment>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidValue(format!(
                "annotation {image_id}: image dimensions {width}x{height} must be positive"
            )));
        }
        let (w, h) = (f64::from(width), f64::from(height));
        for (i, seg) in segments.iter().enumerate() {
            for p in [seg.start(), seg.end()] {
                if p.x < 0.0 || p.x > w || p.y < 0.0 || p.y > h {
                    return Err(Error::InvalidValue(format!(
                        "annotation {image_id}: segment {i} endpoint ({}, {}) outside {width}x{height}",
                        p.x, p.y
                    )));
                }
            }
        }
        Ok(Self {
            image_id,
            width,
            height,
            segments,
        })
    }
}

/// Weights combining the three task losses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LossWeights {
    pub lambda_root: f64,
    pub lambda_disp: f64,
    pub lambda_line: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            lambda_root: 50.0,
            lambda_disp: 1.0,
            lambda_line: 20.0,
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda_root", self.lambda_root),
            ("lambda_disp", self.lambda_disp),
            ("lambda_line", self.lambda_line),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidValue(format!(
                    "{name} = {v} must be finite and non-negative"
                )));
            }
        }
        Ok(())
    }

    /// Weighted sum of already-computed component losses.
    pub fn combine(&self, root_loss: f64, disp_loss: f64, line_loss: f64) -> f64 {
        self.lambda_root * root_loss + self.lambda_disp * disp_loss + self.lambda_line * line_loss
    }
}

/// All supervision targets for one image.
#[derive(Debug, Clone, PartialEq)]
pub struct GtBundle {
    pub root: ScalarMap,
    pub disp: DisplacementField,
    pub line: ScalarMap,
}

fn scale_factors(ann: &Annotation, out_w: usize, out_h: usize) -> (f64, f64) {
    (
        out_w as f64 / f64::from(ann.width),
        out_h as f64 / f64::from(ann.height),
    )
}

fn scaled_endpoints(ann: &Annotation, out_w: usize, out_h: usize) -> Vec<(Point2, Point2)> {
    let (sx, sy) = scale_factors(ann, out_w, out_h);
    ann.segments
        .iter()
        .map(|seg| {
            (
                Point2::new(seg.start().x * sx, seg.start().y * sy),
                Point2::new(seg.end().x * sx, seg.end().y * sy),
            )
        })
        .collect()
}

fn clamp_pixel(v: f64, size: usize) -> usize {
    (v.round().max(0.0) as usize).min(size - 1)
}

/// Root-point confidence targets: a truncated 2D Gaussian (peak exactly 1)
/// around each segment's midpoint pixel, merged with per-pixel max.
pub fn build_root_map(ann: &Annotation, out_w: usize, out_h: usize, sigma: f64) -> ScalarMap {
    assert!(sigma > 0.0, "sigma must be positive");
    let mut map = ScalarMap::zeros(out_w, out_h);
    let r = SUPERVISION_WINDOW_RADIUS as i64;
    for (s, e) in scaled_endpoints(ann, out_w, out_h) {
        let mid = Point2::new((s.x + e.x) / 2.0, (s.y + e.y) / 2.0);
        let px = clamp_pixel(mid.x, out_w) as i64;
        let py = clamp_pixel(mid.y, out_h) as i64;
        for dy in -r..=r {
            for dx in -r..=r {
                let (qx, qy) = (px + dx, py + dy);
                if qx < 0 || qy < 0 || qx >= out_w as i64 || qy >= out_h as i64 {
                    continue;
                }
                let value = (-((dx * dx + dy * dy) as f64) / (2.0 * sigma * sigma)).exp();
                let (qx, qy) = (qx as usize, qy as usize);
                if value > map.get(qx, qy) {
                    map.set(qx, qy, value);
                }
            }
        }
    }
    map
}

/// Displacement targets: for every pixel in the 5x5 window around a
/// segment's midpoint pixel, the vectors from that pixel to the scaled
/// start- and end-points. Later segments overwrite earlier ones where
/// windows collide; pixels outside all windows stay invalid.
pub fn build_disp_field(ann: &Annotation, out_w: usize, out_h: usize) -> DisplacementField {
    let mut field = DisplacementField::zeros(out_w, out_h);
    let r = SUPERVISION_WINDOW_RADIUS as i64;
    for (s, e) in scaled_endpoints(ann, out_w, out_h) {
        let mid = Point2::new((s.x + e.x) / 2.0, (s.y + e.y) / 2.0);
        let px = clamp_pixel(mid.x, out_w) as i64;
        let py = clamp_pixel(mid.y, out_h) as i64;
        for dy in -r..=r {
            for dx in -r..=r {
                let (qx, qy) = (px + dx, py + dy);
                if qx < 0 || qy < 0 || qx >= out_w as i64 || qy >= out_h as i64 {
                    continue;
                }
                let q = Point2::new(qx as f64, qy as f64);
                field.set(qx as usize, qy as usize, s - q, e - q);
            }
        }
    }
    field
}

/// Binary line segmentation targets: the Bresenham trace of every scaled
/// segment drawn onto a zero map.
pub fn build_line_map(ann: &Annotation, out_w: usize, out_h: usize) -> ScalarMap {
    let mut map = ScalarMap::zeros(out_w, out_h);
    for (s, e) in scaled_endpoints(ann, out_w, out_h) {
        let x0 = clamp_pixel(s.x, out_w) as i64;
        let y0 = clamp_pixel(s.y, out_h) as i64;
        let x1 = clamp_pixel(e.x, out_w) as i64;
        let y1 = clamp_pixel(e.y, out_h) as i64;
        for (x, y) in bresenham(x0, y0, x1, y1) {
            map.set(x as usize, y as usize, 1.0);
        }
    }
    map
}

/// Builds all three target maps at once.
pub fn build_gt_bundle(ann: &Annotation, out_w: usize, out_h: usize, sigma: f64) -> GtBundle {
    GtBundle {
        root: build_root_map(ann, out_w, out_h, sigma),
        disp: build_disp_field(ann, out_w, out_h),
        line: build_line_map(ann, out_w, out_h),
    }
}

/// Class-balance weight for the positive term: negatives over positives,
/// where a positive is any target pixel > 0. Returns 1 when the target has
/// no positives.
pub fn balanced_pos_weight(target: &ScalarMap) -> f64 {
    let pos = target.values().iter().filter(|v| **v > 0.0).count();
    if pos == 0 {
        return 1.0;
    }
    (target.values().len() - pos) as f64 / pos as f64
}

/// Weighted binary cross-entropy, averaged over all pixels. The positive
/// term of a pixel with target > 0 is scaled by `pos_weight`; predictions
/// are clamped to `[BCE_EPS, 1 - BCE_EPS]`.
pub fn weighted_bce(pred: &ScalarMap, target: &ScalarMap, pos_weight: f64) -> Result<f64> {
    pred.check_same_dims(target)?;
    let n = pred.values().len();
    if n == 0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for (p, t) in pred.values().iter().zip(target.values()) {
        let p = p.clamp(BCE_EPS, 1.0 - BCE_EPS);
        let w = if *t > 0.0 { pos_weight } else { 1.0 };
        sum -= w * t * p.ln() + (1.0 - t) * (1.0 - p).ln();
    }
    Ok(sum / n as f64)
}

/// Smooth-L1 regression loss over the four displacement channels, averaged
/// over valid target pixels only. Zero when the target mask is empty.
pub fn masked_smooth_l1(pred: &DisplacementField, target: &DisplacementField) -> Result<f64> {
    pred.check_same_dims(target)?;
    let mut sum = 0.0;
    let mut count = 0usize;
    for y in 0..target.height() {
        for x in 0..target.width() {
            let Some((t_start, t_end)) = target.get(x, y) else {
                continue;
            };
            let (p_start, p_end) = pred.raw_at(x, y);
            for d in [
                p_start.x - t_start.x,
                p_start.y - t_start.y,
                p_end.x - t_end.x,
                p_end.y - t_end.y,
            ] {
                let a = d.abs();
                sum += if a < 1.0 { 0.5 * d * d } else { a - 0.5 };
                count += 1;
            }
        }
    }
    if count == 0 {
        Ok(0.0)
    } else {
        Ok(sum / count as f64)
    }
}

/// Combined training loss over a prediction bundle and its targets. The
/// positive-class weights are rebalanced per map.
pub fn total_loss(pred: &GtBundle, gt: &GtBundle, weights: &LossWeights) -> Result<f64> {
    weights.validate()?;
    let root_loss = weighted_bce(&pred.root, &gt.root, balanced_pos_weight(&gt.root))?;
    let disp_loss = masked_smooth_l1(&pred.disp, &gt.disp)?;
    let line_loss = weighted_bce(&pred.line, &gt.line, balanced_pos_weight(&gt.line))?;
    Ok(weights.combine(root_loss, disp_loss, line_loss))
}
