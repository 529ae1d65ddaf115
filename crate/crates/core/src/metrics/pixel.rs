//! Pixel-level F-score: rasterized detections matched against rasterized
//! ground truth within a distance tolerance.

use rayon::prelude::*;
use serde::Serialize;

use super::{AnnotationSet, Detection, MetricConfig};
use crate::error::{Error, Result};
use crate::geom::LineSegment;
use crate::raster::bresenham;

/// Precision/recall/F at one confidence threshold, with the raw pixel
/// counts behind them. `predicted_pixels == 0` flags the empty-prediction
/// convention (precision reported as 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PixelFScore {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
    pub predicted_pixels: usize,
    pub matched_predicted: usize,
    pub gt_pixels: usize,
    pub matched_gt: usize,
}

/// Rasterizes segments onto the eval grid.
fn rasterize(segments: &[&LineSegment], img_w: u32, img_h: u32, size: usize) -> Vec<bool> {
    let sx = size as f64 / f64::from(img_w);
    let sy = size as f64 / f64::from(img_h);
    let clamp = |v: f64| (v.round().max(0.0) as i64).min(size as i64 - 1);
    let mut grid = vec![false; size * size];
    for seg in segments {
        let x0 = clamp(seg.start().x * sx);
        let y0 = clamp(seg.start().y * sy);
        let x1 = clamp(seg.end().x * sx);
        let y1 = clamp(seg.end().y * sy);
        for (x, y) in bresenham(x0, y0, x1, y1) {
            grid[y as usize * size + x as usize] = true;
        }
    }
    grid
}

const FAR: f64 = 1e20;

/// One-dimensional squared distance transform (lower envelope of
/// parabolas). `f` holds per-cell source costs, `FAR` where empty.
fn dt_1d(f: &[f64], out: &mut [f64]) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2 * q - 2 * p) as f64;
            if s <= z[k] {
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
                break;
            }
        }
    }
    k = 0;
    for (q, slot) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let d = q as f64 - p as f64;
        *slot = d * d + f[p];
    }
}

/// Exact squared Euclidean distance to the nearest seed pixel. Cells with
/// no seed anywhere stay at `FAR` magnitude.
pub(crate) fn squared_edt(seeds: &[bool], width: usize, height: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = seeds.iter().map(|s| if *s { 0.0 } else { FAR }).collect();
    let mut row_out = vec![0.0f64; width];
    for y in 0..height {
        let row = &mut grid[y * width..(y + 1) * width];
        dt_1d(row, &mut row_out);
        row.copy_from_slice(&row_out);
    }
    let mut col_in = vec![0.0f64; height];
    let mut col_out = vec![0.0f64; height];
    for x in 0..width {
        for y in 0..height {
            col_in[y] = grid[y * width + x];
        }
        dt_1d(&col_in, &mut col_out);
        for y in 0..height {
            grid[y * width + x] = col_out[y];
        }
    }
    grid
}

fn count_within(source: &[bool], dist_sq: &[f64], tol_sq: f64) -> (usize, usize) {
    let mut total = 0usize;
    let mut matched = 0usize;
    for (s, d) in source.iter().zip(dist_sq) {
        if *s {
            total += 1;
            if *d <= tol_sq {
                matched += 1;
            }
        }
    }
    (total, matched)
}

/// Pixel F-score at a single confidence threshold, aggregated over all
/// images. Detections with confidence at or above `score_threshold` are
/// rasterized; a predicted pixel is a true positive when it lies within
/// the configured tolerance of any ground-truth pixel, and recall is the
/// symmetric count over ground-truth pixels.
pub fn pixel_fscore(
    dets: &[Detection],
    gts: &AnnotationSet,
    cfg: &MetricConfig,
    score_threshold: f64,
) -> Result<PixelFScore> {
    cfg.validate()?;
    for det in dets {
        if !gts.contains_key(&det.image_id) {
            return Err(Error::UnknownImage(det.image_id.clone()));
        }
    }
    let size = cfg.eval_size as usize;
    let tol = cfg.pixel_tolerance();
    let tol_sq = tol * tol;

    let images: Vec<(&String, &crate::gtmaps::Annotation)> = gts.iter().collect();
    let counts: Vec<(usize, usize, usize, usize)> = images
        .par_iter()
        .map(|(id, ann)| {
            let det_segs: Vec<&LineSegment> = dets
                .iter()
                .filter(|d| d.image_id == **id && d.segment.confidence() >= score_threshold)
                .map(|d| &d.segment)
                .collect();
            let gt_segs: Vec<&LineSegment> = ann.segments.iter().collect();
            let pred = rasterize(&det_segs, ann.width, ann.height, size);
            let gt = rasterize(&gt_segs, ann.width, ann.height, size);
            let gt_dist = squared_edt(&gt, size, size);
            let (pred_total, pred_matched) = count_within(&pred, &gt_dist, tol_sq);
            let pred_dist = squared_edt(&pred, size, size);
            let (gt_total, gt_matched) = count_within(&gt, &pred_dist, tol_sq);
            (pred_total, pred_matched, gt_total, gt_matched)
        })
        .collect();

    let mut predicted_pixels = 0;
    let mut matched_predicted = 0;
    let mut gt_pixels = 0;
    let mut matched_gt = 0;
    for (pt, pm, gt, gm) in counts {
        predicted_pixels += pt;
        matched_predicted += pm;
        gt_pixels += gt;
        matched_gt += gm;
    }

    let precision = if predicted_pixels > 0 {
        matched_predicted as f64 / predicted_pixels as f64
    } else {
        0.0
    };
    let recall = if gt_pixels > 0 {
        matched_gt as f64 / gt_pixels as f64
    } else {
        0.0
    };
    let f = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(PixelFScore {
        precision,
        recall,
        f,
        predicted_pixels,
        matched_predicted,
        gt_pixels,
        matched_gt,
    })
}
