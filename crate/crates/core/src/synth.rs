//! Synthetic scenes and controlled perturbations with analytically known
//! error structure, plus a deliberately naive LMS oracle for testing the
//! fast metric path.
//!
//! Everything here is a pure function of its inputs and a seed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{LineSegment, Point2, Vec2};
use crate::gtmaps::Annotation;
use crate::metrics::{Detection, MetricConfig};

/// SplitMix64 (Steele, Lea & Flood, "Fast splittable pseudorandom number
/// generators", OOPSLA 2014). Chosen for reproducibility across languages:
/// the whole state transition is three published 64-bit constants.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[lo, hi]` inclusive.
    pub fn next_in(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        lo + (self.next_f64() * (hi - lo + 1) as f64) as i64
    }
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for element `index` of a seeded collection. Seed and
/// index are scrambled through the SplitMix64 finalizer; merely spacing
/// seeds by the golden constant would put every stream on the same orbit,
/// one draw apart.
pub fn stream(seed: u64, index: u64) -> SplitMix64 {
    let salt = mix(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    SplitMix64::new(mix(seed ^ salt))
}

/// Minimum pairwise midpoint separation of generated segments, in pixels.
pub const MIN_MIDPOINT_SEPARATION: f64 = 6.0;

/// Minimum generated segment length, in pixels.
pub const MIN_SEGMENT_LENGTH: f64 = 10.0;

const MAX_HALF_EXTENT: i64 = 40;
const BORDER_MARGIN: i64 = 1;
const MAX_ATTEMPTS_PER_SEGMENT: usize = 10_000;

/// Generates a deterministic scene of `n_segments` segments inside an
/// `img_w` x `img_h` image.
///
/// Segments are drawn on the integer lattice as midpoint +/- half-vector,
/// so midpoints are exact pixel centers and map-construction round trips
/// are exact. Lengths are at least [`MIN_SEGMENT_LENGTH`], midpoints are
/// pairwise at least [`MIN_MIDPOINT_SEPARATION`] apart, and endpoints stay
/// one pixel inside the border. Candidates violating a constraint are
/// redrawn from the segment's own stream.
pub fn generate_scene(n_segments: usize, img_w: u32, img_h: u32, seed: u64) -> Annotation {
    let w = i64::from(img_w);
    let h = i64::from(img_h);
    let mut segments: Vec<LineSegment> = Vec::with_capacity(n_segments);
    let mut midpoints: Vec<(i64, i64)> = Vec::with_capacity(n_segments);
    let min_sep_sq = (MIN_MIDPOINT_SEPARATION * MIN_MIDPOINT_SEPARATION) as i64;
    let min_half_sq = {
        let half = MIN_SEGMENT_LENGTH / 2.0;
        (half * half).ceil() as i64
    };

    for index in 0..n_segments {
        let mut rng = stream(seed, index as u64);
        let mut placed = false;
        for _ in 0..MAX_ATTEMPTS_PER_SEGMENT {
            let mx = rng.next_in(BORDER_MARGIN, w - 1 - BORDER_MARGIN);
            let my = rng.next_in(BORDER_MARGIN, h - 1 - BORDER_MARGIN);
            let hx = rng.next_in(-MAX_HALF_EXTENT, MAX_HALF_EXTENT);
            let hy = rng.next_in(-MAX_HALF_EXTENT, MAX_HALF_EXTENT);
            let half_sq = hx * hx + hy * hy;
            if half_sq < min_half_sq {
                continue;
            }
            let (ax, ay) = (mx - hx, my - hy);
            let (bx, by) = (mx + hx, my + hy);
            let in_bounds = |x: i64, y: i64| {
                x >= BORDER_MARGIN && x <= w - 1 - BORDER_MARGIN && y >= BORDER_MARGIN && y <= h - 1 - BORDER_MARGIN
            };
            if !in_bounds(ax, ay) || !in_bounds(bx, by) {
                continue;
            }
            if midpoints
                .iter()
                .any(|(ox, oy)| (mx - ox).pow(2) + (my - oy).pow(2) < min_sep_sq)
            {
                continue;
            }
            let seg = LineSegment::new(
                Point2::new(ax as f64, ay as f64),
                Point2::new(bx as f64, by as f64),
                1.0,
            )
            .expect("half-vector is nonzero");
            segments.push(seg);
            midpoints.push((mx, my));
            placed = true;
            break;
        }
        if !placed {
            // Image too crowded for the separation constraint; stop early.
            break;
        }
    }

    Annotation::new(format!("scene-{seed:016x}"), img_w, img_h, segments)
        .expect("generated endpoints are in bounds")
}

/// A deterministic perturbation applied to every ground-truth segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PerturbSpec {
    /// Rotation about each segment's midpoint, degrees.
    pub rotate_deg: f64,
    /// Length scale about the midpoint; must be positive.
    pub length_scale: f64,
    /// Translation applied after rotation and scaling, pixels.
    pub translate: [f64; 2],
    /// Number of equal collinear pieces each segment is cut into.
    pub split_count: usize,
    /// Confidence assigned to every emitted detection.
    pub confidence: f64,
    /// Seed identifying this perturbation run; the transforms above are
    /// fully deterministic and draw no random numbers.
    pub seed: u64,
}

impl Default for PerturbSpec {
    fn default() -> Self {
        Self {
            rotate_deg: 0.0,
            length_scale: 1.0,
            translate: [0.0, 0.0],
            split_count: 1,
            confidence: 1.0,
            seed: 0,
        }
    }
}

impl PerturbSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.rotate_deg.is_finite() {
            return Err(Error::NonFinite("rotate_deg"));
        }
        if !self.length_scale.is_finite() || self.length_scale <= 0.0 {
            return Err(Error::InvalidValue(format!(
                "length_scale {} must be positive",
                self.length_scale
            )));
        }
        if !self.translate[0].is_finite() || !self.translate[1].is_finite() {
            return Err(Error::NonFinite("translate"));
        }
        if self.split_count == 0 {
            return Err(Error::InvalidValue("split_count must be >= 1".into()));
        }
        if !self.confidence.is_finite() || !(0.0..=1.0).contains(&self.confidence) {
            return Err(Error::InvalidValue(format!(
                "confidence {} outside [0, 1]",
                self.confidence
            )));
        }
        Ok(())
    }
}

/// Clips segment `a`-`b` to the rectangle `[0, w] x [0, h]`
/// (Liang-Barsky). Returns `None` when nothing remains inside.
fn clip_to_image(a: Point2, b: Point2, w: f64, h: f64) -> Option<(Point2, Point2)> {
    let d = b - a;
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for (p, q) in [
        (-d.x, a.x),
        (d.x, w - a.x),
        (-d.y, a.y),
        (d.y, h - a.y),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
            continue;
        }
        let r = q / p;
        if p < 0.0 {
            if r > t1 {
                return None;
            }
            t0 = t0.max(r);
        } else {
            if r < t0 {
                return None;
            }
            t1 = t1.min(r);
        }
    }
    if t0 >= t1 {
        return None;
    }
    let at = |t: f64| Point2::new(a.x + d.x * t, a.y + d.y * t);
    Some((at(t0), at(t1)))
}

/// Applies the perturbation to every annotated segment and emits the
/// resulting detections, clipped to the image. Pieces that leave the image
/// or collapse are dropped.
pub fn perturb(ann: &Annotation, spec: &PerturbSpec) -> Result<Vec<Detection>> {
    spec.validate()?;
    let phi = spec.rotate_deg.to_radians();
    let (sin, cos) = phi.sin_cos();
    let rotate_scale = |v: Vec2| {
        Vec2::new(
            (v.x * cos - v.y * sin) * spec.length_scale,
            (v.x * sin + v.y * cos) * spec.length_scale,
        )
    };
    let shift = Vec2::new(spec.translate[0], spec.translate[1]);
    let (w, h) = (f64::from(ann.width), f64::from(ann.height));

    let mut out = Vec::new();
    for seg in &ann.segments {
        let m = seg.midpoint();
        let a = m + rotate_scale(seg.start() - m) + shift;
        let b = m + rotate_scale(seg.end() - m) + shift;
        for piece in 0..spec.split_count {
            let t_lo = piece as f64 / spec.split_count as f64;
            let t_hi = (piece + 1) as f64 / spec.split_count as f64;
            let lerp = |t: f64| Point2::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t);
            let Some((p, q)) = clip_to_image(lerp(t_lo), lerp(t_hi), w, h) else {
                continue;
            };
            let Ok(piece_seg) = LineSegment::new(p, q, spec.confidence) else {
                continue;
            };
            out.push(Detection {
                image_id: ann.image_id.clone(),
                segment: piece_seg,
            });
        }
    }
    Ok(out)
}

/// LMS computed by an intentionally naive, separate path: raw 3-vector
/// arrays for the angle score and a sampled overlap length refined by
/// bisection for the length score. Exists to cross-check the closed-form
/// implementation in `metrics`.
pub fn oracle_lms(
    pred: &LineSegment,
    gt: &LineSegment,
    img_w: u32,
    img_h: u32,
    cfg: &MetricConfig,
) -> f64 {
    let sx = f64::from(cfg.eval_size) / f64::from(img_w);
    let sy = f64::from(cfg.eval_size) / f64::from(img_h);
    let p0 = [pred.start().x * sx, pred.start().y * sy];
    let p1 = [pred.end().x * sx, pred.end().y * sy];
    let g0 = [gt.start().x * sx, gt.start().y * sy];
    let g1 = [gt.end().x * sx, gt.end().y * sy];

    // Angle score on raw arrays, written out longhand.
    let score_theta = {
        let f = cfg.virtual_focal;
        let mx = (g0[0] + g1[0]) / 2.0;
        let my = (g0[1] + g1[1]) / 2.0;
        let lift = |p: [f64; 2]| [(p[0] - mx) / f, (p[1] - my) / f, 1.0];
        let cross = |a: [f64; 3], b: [f64; 3]| {
            [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ]
        };
        let n_gt = cross(lift(g0), lift(g1));
        let n_pred = cross(lift(p0), lift(p1));
        let dot = (n_gt[0] * n_pred[0] + n_gt[1] * n_pred[1] + n_gt[2] * n_pred[2]).abs();
        let nc = cross(n_gt, n_pred);
        let sin = (nc[0] * nc[0] + nc[1] * nc[1] + nc[2] * nc[2]).sqrt();
        let theta_deg = sin.atan2(dot).to_degrees();
        if theta_deg < cfg.eta_theta_deg {
            1.0 - theta_deg / cfg.eta_theta_deg
        } else {
            0.0
        }
    };

    // Overlap measured by walking sample points along the prediction and
    // testing whether their projections land inside the ground truth,
    // then bisecting the entry/exit crossings.
    let score_l = {
        let gt_len = ((g1[0] - g0[0]).powi(2) + (g1[1] - g0[1]).powi(2)).sqrt();
        let ux = (g1[0] - g0[0]) / gt_len;
        let uy = (g1[1] - g0[1]) / gt_len;
        // Projection parameter on the ground-truth line of the point at
        // fraction t along the prediction.
        let s_of = |t: f64| {
            let x = p0[0] + (p1[0] - p0[0]) * t;
            let y = p0[1] + (p1[1] - p0[1]) * t;
            (x - g0[0]) * ux + (y - g0[1]) * uy
        };
        let inside = |t: f64| {
            let s = s_of(t);
            (0.0..=gt_len).contains(&s)
        };

        const SAMPLES: usize = 10_000;
        let t_at = |i: usize| i as f64 / SAMPLES as f64;
        let mut first_in = None;
        let mut last_in = None;
        for i in 0..=SAMPLES {
            if inside(t_at(i)) {
                if first_in.is_none() {
                    first_in = Some(i);
                }
                last_in = Some(i);
            }
        }
        let overlap = match (first_in, last_in) {
            (Some(lo), Some(hi)) => {
                let bisect = |mut t_out: f64, mut t_in: f64| {
                    for _ in 0..64 {
                        let mid = (t_out + t_in) / 2.0;
                        if inside(mid) {
                            t_in = mid;
                        } else {
                            t_out = mid;
                        }
                    }
                    t_in
                };
                let t_enter = if lo == 0 {
                    0.0
                } else {
                    bisect(t_at(lo - 1), t_at(lo))
                };
                let t_exit = if hi == SAMPLES {
                    1.0
                } else {
                    bisect(t_at(hi + 1), t_at(hi))
                };
                (s_of(t_exit) - s_of(t_enter)).abs()
            }
            _ => 0.0,
        };

        let eta1 = overlap / gt_len;
        let span = (s_of(1.0) - s_of(0.0)).abs();
        let eta2 = if span > 0.0 { overlap / span } else { 0.0 };
        if eta1 >= cfg.eta_l && eta2 >= cfg.eta_l {
            (eta1 + eta2) / 2.0
        } else {
            0.0
        }
    };

    score_theta * score_l
}
