//! Pairwise segment scores: endpoint SSE, the normal-vector angle score,
//! the overlap score, and their product (LMS).

use super::MetricConfig;
use crate::error::Result;
use crate::geom::{LineSegment, Point2};

/// Rescales a segment from an `img_w` x `img_h` image onto the square
/// eval grid, per axis.
pub fn rescale_to_eval(
    seg: &LineSegment,
    img_w: u32,
    img_h: u32,
    cfg: &MetricConfig,
) -> Result<LineSegment> {
    let sx = f64::from(cfg.eval_size) / f64::from(img_w);
    let sy = f64::from(cfg.eval_size) / f64::from(img_h);
    let scale = |p: Point2| Point2::new(p.x * sx, p.y * sy);
    LineSegment::new(scale(seg.start()), scale(seg.end()), seg.confidence())
}

/// Sum of squared endpoint errors, minimized over the two endpoint
/// pairings. Both segments must already be in eval coordinates.
pub fn sse(pred: &LineSegment, gt: &LineSegment) -> f64 {
    let d2 = |a: Point2, b: Point2| {
        let v = a - b;
        v.x * v.x + v.y * v.y
    };
    let direct = d2(pred.start(), gt.start()) + d2(pred.end(), gt.end());
    let swapped = d2(pred.start(), gt.end()) + d2(pred.end(), gt.start());
    direct.min(swapped)
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Direction score from the angle between the planes spanned by each
/// segment and the optical center.
///
/// Both segments are centered on the ground-truth midpoint, lifted onto
/// the normalized image plane `(x/f, y/f, 1)`, and each contributes the
/// normal of its endpoint rays. The angle between the normals is folded to
/// `[0, 90]` degrees (normals are sign-ambiguous) and mapped linearly to
/// `[0, 1]` below the `eta_theta_deg` threshold, 0 otherwise. Scores 1
/// exactly when the segments are collinear.
pub fn score_theta(pred: &LineSegment, gt: &LineSegment, cfg: &MetricConfig) -> f64 {
    let m = gt.midpoint();
    let f = cfg.virtual_focal;
    let lift = |p: Point2| [(p.x - m.x) / f, (p.y - m.y) / f, 1.0];
    let n_gt = cross3(lift(gt.start()), lift(gt.end()));
    let n_pred = cross3(lift(pred.start()), lift(pred.end()));
    // Normals cannot vanish: z = 1 on the lifted endpoints makes the cross
    // product zero only for coincident endpoints, which the segment type
    // excludes. sqrt(d*d) == d in IEEE arithmetic, so identical normals
    // give cos exactly 1.
    let cos = (dot3(n_gt, n_pred).abs() / (dot3(n_gt, n_gt) * dot3(n_pred, n_pred)).sqrt())
        .clamp(0.0, 1.0);
    let theta_deg = cos.acos().to_degrees();
    if theta_deg < cfg.eta_theta_deg {
        1.0 - theta_deg / cfg.eta_theta_deg
    } else {
        0.0
    }
}

/// Length/overlap score.
///
/// The prediction's endpoints are projected onto the ground-truth line.
/// `eta1` is the overlap (the projected interval clipped to the ground
/// truth's own extent) over the ground-truth length; `eta2` is the overlap
/// over the full projected length, which equals the prediction length
/// times |cos| of the 2D angle between the segments. Both ratios must
/// reach `eta_l`, otherwise the score is 0. A perpendicular prediction
/// projects to a point and scores 0 without any division.
///
/// All projections are kept in unnormalized units (scaled by the
/// ground-truth length), so the ratios are exact for lattice-aligned
/// inputs; the normalization cancels out of both ratios.
pub fn score_l(pred: &LineSegment, gt: &LineSegment, cfg: &MetricConfig) -> f64 {
    let v = gt.end() - gt.start();
    // The ground truth occupies [0, span] of its own projection axis.
    let span = v.dot(v);
    let s_start = (pred.start() - gt.start()).dot(v);
    let s_end = (pred.end() - gt.start()).dot(v);
    let (lo, hi) = if s_start <= s_end {
        (s_start, s_end)
    } else {
        (s_end, s_start)
    };
    let overlap = (hi.min(span) - lo.max(0.0)).max(0.0);
    let eta1 = overlap / span;
    let projected = hi - lo;
    let eta2 = if projected > 0.0 { overlap / projected } else { 0.0 };
    if eta1 >= cfg.eta_l && eta2 >= cfg.eta_l {
        (eta1 + eta2) / 2.0
    } else {
        0.0
    }
}

/// Line matching score: the product of the direction and overlap scores,
/// computed after rescaling both segments to eval coordinates.
pub fn lms(
    pred: &LineSegment,
    gt: &LineSegment,
    img_w: u32,
    img_h: u32,
    cfg: &MetricConfig,
) -> Result<f64> {
    let p = rescale_to_eval(pred, img_w, img_h, cfg)?;
    let g = rescale_to_eval(gt, img_w, img_h, cfg)?;
    Ok(score_theta(&p, &g, cfg) * score_l(&p, &g, cfg))
}
