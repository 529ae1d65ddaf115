//! Greedy confidence-ordered matching and precision-recall accumulation.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::score::{lms, rescale_to_eval, sse};
use super::{AnnotationSet, Detection, MetricConfig};
use crate::error::{Error, Result};
use crate::geom::LineSegment;

/// One point of a precision-recall sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrPoint {
    pub recall: f64,
    pub precision: f64,
    /// Confidence of the detection that produced this point.
    pub threshold: f64,
}

/// A precision-recall curve with its area. Recalls are non-decreasing
/// along `points`; `ap` lies in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PRCurve {
    pub points: Vec<PrPoint>,
    pub ap: f64,
}

/// True-positive predicate used during matching.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatchCriterion {
    /// True positive when LMS exceeds `min_score`; among candidates the
    /// highest LMS wins.
    Lms { min_score: f64 },
    /// True positive when endpoint SSE in eval coordinates is below
    /// `max_sse`; among candidates the lowest SSE wins.
    Sse { max_sse: f64 },
}

impl MatchCriterion {
    /// `Some(quality)` when the detection may match this ground-truth
    /// segment; higher quality is preferred during greedy assignment.
    pub fn match_quality(
        &self,
        det: &LineSegment,
        gt: &LineSegment,
        img_w: u32,
        img_h: u32,
        cfg: &MetricConfig,
    ) -> Result<Option<f64>> {
        match self {
            MatchCriterion::Lms { min_score } => {
                let v = lms(det, gt, img_w, img_h, cfg)?;
                Ok((v > *min_score).then_some(v))
            }
            MatchCriterion::Sse { max_sse } => {
                let d = rescale_to_eval(det, img_w, img_h, cfg)?;
                let g = rescale_to_eval(gt, img_w, img_h, cfg)?;
                let v = sse(&d, &g);
                Ok((v < *max_sse).then_some(-v))
            }
        }
    }
}

/// Greedy one-to-one matching over a confidence-descending sweep, yielding
/// the PR curve and its trapezoidal area.
///
/// Detections are ordered globally by confidence (ties by image id, then
/// input position). Each detection consumes the best not-yet-matched
/// ground-truth segment of its image that satisfies the criterion;
/// detections with no candidate count as false positives. The sweep is a
/// sequential reduction over per-image quality tables computed in
/// parallel, so output is independent of worker count.
pub fn match_and_ap(
    dets: &[Detection],
    gts: &AnnotationSet,
    criterion: &MatchCriterion,
    cfg: &MetricConfig,
) -> Result<PRCurve> {
    cfg.validate()?;
    for det in dets {
        if !gts.contains_key(&det.image_id) {
            return Err(Error::UnknownImage(det.image_id.clone()));
        }
    }

    // Detection indices grouped per image, input order preserved.
    let mut per_image: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, det) in dets.iter().enumerate() {
        per_image.entry(det.image_id.as_str()).or_default().push(i);
    }
    let mut images: Vec<(&str, Vec<usize>)> = per_image.into_iter().collect();
    images.sort_by_key(|(id, _)| *id);

    // Quality of every (detection, gt) pair, indexed by detection.
    let tables: Vec<Vec<(usize, Vec<Option<f64>>)>> = images
        .par_iter()
        .map(|(id, det_indices)| {
            let ann = &gts[*id];
            det_indices
                .iter()
                .map(|&di| {
                    let rows = ann
                        .segments
                        .iter()
                        .map(|gt_seg| {
                            criterion.match_quality(
                                &dets[di].segment,
                                gt_seg,
                                ann.width,
                                ann.height,
                                cfg,
                            )
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok((di, rows))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut quality_by_det: Vec<Vec<Option<f64>>> = vec![Vec::new(); dets.len()];
    for table in tables {
        for (di, rows) in table {
            quality_by_det[di] = rows;
        }
    }

    let total_gt: usize = gts.values().map(|a| a.segments.len()).sum();
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| {
        dets[b]
            .segment
            .confidence()
            .total_cmp(&dets[a].segment.confidence())
            .then_with(|| dets[a].image_id.cmp(&dets[b].image_id))
            .then_with(|| a.cmp(&b))
    });

    let mut matched: HashMap<&str, Vec<bool>> = gts
        .iter()
        .map(|(id, ann)| (id.as_str(), vec![false; ann.segments.len()]))
        .collect();

    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut points = Vec::with_capacity(dets.len());
    for di in order {
        let det = &dets[di];
        let taken = matched.get_mut(det.image_id.as_str()).expect("validated id");
        let best = quality_by_det[di]
            .iter()
            .enumerate()
            .filter_map(|(gi, q)| q.map(|q| (gi, q)))
            .filter(|(gi, _)| !taken[*gi])
            .max_by(|a, b| a.1.total_cmp(&b.1).then_with(|| b.0.cmp(&a.0)));
        match best {
            Some((gi, _)) => {
                taken[gi] = true;
                tp += 1;
            }
            None => fp += 1,
        }
        let recall = if total_gt > 0 {
            tp as f64 / total_gt as f64
        } else {
            0.0
        };
        points.push(PrPoint {
            recall,
            precision: tp as f64 / (tp + fp) as f64,
            threshold: det.segment.confidence(),
        });
    }

    let ap = trapezoid_ap(&points);
    Ok(PRCurve { points, ap })
}

/// Area under the PR sweep by trapezoidal integration over recall,
/// anchored at (recall 0, first precision).
fn trapezoid_ap(points: &[PrPoint]) -> f64 {
    let Some(first) = points.first() else {
        return 0.0;
    };
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    let mut prev_precision = first.precision;
    for p in points {
        ap += (p.recall - prev_recall) * (p.precision + prev_precision) / 2.0;
        prev_recall = p.recall;
        prev_precision = p.precision;
    }
    ap
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point2;
    use crate::gtmaps::Annotation;
    use crate::metrics::annotation_set;

    fn seg(ax: f64, ay: f64, bx: f64, by: f64, conf: f64) -> LineSegment {
        LineSegment::new(Point2::new(ax, ay), Point2::new(bx, by), conf).unwrap()
    }

    fn one_image(segments: Vec<LineSegment>) -> AnnotationSet {
        let ann = Annotation::new("img".into(), 128, 128, segments).unwrap();
        annotation_set(vec![ann]).unwrap()
    }

    fn det(s: LineSegment) -> Detection {
        Detection {
            image_id: "img".into(),
            segment: s,
        }
    }

    #[test]
    fn perfect_detector_ap_one() {
        let gts = one_image(vec![
            seg(10.0, 10.0, 60.0, 10.0, 1.0),
            seg(20.0, 50.0, 20.0, 100.0, 1.0),
        ]);
        let dets: Vec<Detection> = gts["img"].segments.iter().map(|s| det(*s)).collect();
        let curve = match_and_ap(
            &dets,
            &gts,
            &MatchCriterion::Lms { min_score: 0.5 },
            &MetricConfig::default(),
        )
        .unwrap();
        assert!((curve.ap - 1.0).abs() < 1e-12);
        let last = curve.points.last().unwrap();
        assert_eq!((last.recall, last.precision), (1.0, 1.0));
    }

    #[test]
    fn no_detections_ap_zero() {
        let gts = one_image(vec![seg(10.0, 10.0, 60.0, 10.0, 1.0)]);
        let curve = match_and_ap(
            &[],
            &gts,
            &MatchCriterion::Lms { min_score: 0.5 },
            &MetricConfig::default(),
        )
        .unwrap();
        assert_eq!(curve.ap, 0.0);
        assert!(curve.points.is_empty());
    }

    #[test]
    fn hand_executed_sweep_ap_half() {
        // Two GT segments; detections are an exact copy of the first at
        // confidence 0.9 and a far-away segment at 0.8. The sweep hits
        // precision 1 at recall 0.5, then precision 0.5 at recall 0.5.
        let g1 = seg(10.0, 10.0, 60.0, 10.0, 1.0);
        let g2 = seg(20.0, 50.0, 20.0, 100.0, 1.0);
        let gts = one_image(vec![g1, g2]);
        let dets = vec![
            det(g1.with_confidence(0.9).unwrap()),
            det(seg(100.0, 120.0, 120.0, 125.0, 0.8)),
        ];
        let curve = match_and_ap(
            &dets,
            &gts,
            &MatchCriterion::Lms { min_score: 0.5 },
            &MetricConfig::default(),
        )
        .unwrap();
        assert_eq!(curve.points.len(), 2);
        assert_eq!(
            (curve.points[0].recall, curve.points[0].precision),
            (0.5, 1.0)
        );
        assert_eq!(
            (curve.points[1].recall, curve.points[1].precision),
            (0.5, 0.5)
        );
        assert!((curve.ap - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unknown_image_rejected() {
        let gts = one_image(vec![seg(10.0, 10.0, 60.0, 10.0, 1.0)]);
        let mut d = det(seg(10.0, 10.0, 60.0, 10.0, 0.9));
        d.image_id = "other".into();
        let err = match_and_ap(
            &[d],
            &gts,
            &MatchCriterion::Lms { min_score: 0.5 },
            &MetricConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnknownImage(_)));
    }

    #[test]
    fn sse_criterion_prefers_closest_gt() {
        let g1 = seg(10.0, 10.0, 60.0, 10.0, 1.0);
        let g2 = seg(10.0, 12.0, 60.0, 12.0, 1.0);
        let gts = one_image(vec![g1, g2]);
        // One detection slightly closer to g2; with both available it must
        // consume g2 and leave g1 unmatched.
        let dets = vec![det(seg(10.0, 11.5, 60.0, 11.5, 0.9))];
        let curve = match_and_ap(
            &dets,
            &gts,
            &MatchCriterion::Sse { max_sse: 10.0 },
            &MetricConfig::default(),
        )
        .unwrap();
        assert_eq!(curve.points[0].precision, 1.0);
        assert_eq!(curve.points[0].recall, 0.5);
    }
}
