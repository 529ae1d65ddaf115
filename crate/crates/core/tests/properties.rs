//! Property tests for the geometric primitives, the decoder, and the
//! metric suite.

use proptest::prelude::*;

use lseval_core::decode::{nms_peaks, point_filter};
use lseval_core::geom::{
    canonicalize, segment_to_tp, tp_to_segment, LineSegment, Point2, Vec2,
};
use lseval_core::gtmaps::Annotation;
use lseval_core::map::ScalarMap;
use lseval_core::metrics::{
    annotation_set, lms, match_and_ap, rescale_to_eval, score_theta, sse, Detection,
    MatchCriterion, MetricConfig,
};

fn finite_point() -> impl Strategy<Value = Point2> {
    (-500.0..500.0f64, -500.0..500.0f64).prop_map(|(x, y)| Point2::new(x, y))
}

fn segment() -> impl Strategy<Value = LineSegment> {
    (finite_point(), -500.0..500.0f64, -500.0..500.0f64)
        .prop_filter_map("nonzero extent", |(a, dx, dy)| {
            if dx.abs() + dy.abs() < 1.0 {
                return None;
            }
            LineSegment::new(a, Point2::new(a.x + dx, a.y + dy), 1.0).ok()
        })
}

fn in_image_segment(w: f64, h: f64) -> impl Strategy<Value = LineSegment> {
    (
        1.0..(w - 1.0),
        1.0..(h - 1.0),
        -60.0..60.0f64,
        -60.0..60.0f64,
    )
        .prop_filter_map("inside image, nonzero", move |(x, y, dx, dy)| {
            if dx.abs() + dy.abs() < 2.0 {
                return None;
            }
            let a = Point2::new(x, y);
            let b = Point2::new((x + dx).clamp(0.0, w), (y + dy).clamp(0.0, h));
            LineSegment::new(a, b, 1.0).ok()
        })
}

proptest! {
    #[test]
    fn canonicalize_is_order_insensitive(a in finite_point(), b in finite_point()) {
        prop_assume!(a != b);
        let ab = canonicalize(a, b, 1.0).unwrap();
        let ba = canonicalize(b, a, 1.0).unwrap();
        prop_assert_eq!(ab, ba);
        // Idempotent: re-canonicalizing the canonical endpoints changes nothing.
        let again = canonicalize(ab.start(), ab.end(), 1.0).unwrap();
        prop_assert_eq!(ab, again);
        // The point set is preserved exactly.
        prop_assert!((ab.start() == a && ab.end() == b) || (ab.start() == b && ab.end() == a));
    }

    #[test]
    fn tri_point_roundtrip(seg in segment()) {
        let back = tp_to_segment(&segment_to_tp(&seg)).unwrap();
        prop_assert!((back.start().x - seg.start().x).abs() < 1e-9);
        prop_assert!((back.start().y - seg.start().y).abs() < 1e-9);
        prop_assert!((back.end().x - seg.end().x).abs() < 1e-9);
        prop_assert!((back.end().y - seg.end().y).abs() < 1e-9);
    }

    #[test]
    fn tp_to_segment_is_canonical(root in finite_point(), dx in -50.0..50.0f64, dy in -50.0..50.0f64) {
        prop_assume!(dx.abs() + dy.abs() > 0.5);
        // Displacements with any sign combination still canonicalize.
        let tp = lseval_core::geom::TriPoint::new(
            root,
            Vec2::new(dx, dy),
            Vec2::new(-dy * 0.5, dx * 0.5 + 1.0),
            1.0,
        );
        prop_assume!(tp.is_ok());
        let seg = tp_to_segment(&tp.unwrap());
        prop_assume!(seg.is_ok());
        let seg = seg.unwrap();
        let canonical = seg.start().x < seg.end().x
            || (seg.start().x == seg.end().x && seg.start().y < seg.end().y);
        prop_assert!(canonical);
    }

    #[test]
    fn point_filter_never_increases(
        values in proptest::collection::vec((0.0..=1.0f64, 0.0..=1.0f64), 1..64),
        alpha in 0.0..=1.0f64,
    ) {
        let n = values.len();
        let (root, line): (Vec<f64>, Vec<f64>) = values.into_iter().unzip();
        let root = ScalarMap::from_values(n, 1, root).unwrap();
        let line = ScalarMap::from_values(n, 1, line).unwrap();
        let filtered = point_filter(&root, &line, alpha).unwrap();
        for (f, r) in filtered.values().iter().zip(root.values()) {
            prop_assert!(*f <= *r + 1e-15);
            prop_assert!((0.0..=1.0).contains(f));
        }
    }

    #[test]
    fn nms_peaks_are_separated_and_bounded(
        values in proptest::collection::vec(0.0..=1.0f64, 81..=81),
        max_detections in 1usize..6,
    ) {
        let map = ScalarMap::from_values(9, 9, values).unwrap();
        let peaks = nms_peaks(&map, 3, 0.1, max_detections);
        prop_assert!(peaks.len() <= max_detections);
        for (i, (a, _)) in peaks.iter().enumerate() {
            for (b, _) in peaks.iter().skip(i + 1) {
                let dx = (a.x - b.x).abs();
                let dy = (a.y - b.y).abs();
                // Pairwise non-adjacent within the window radius.
                prop_assert!(dx.max(dy) > 1.0, "peaks {a:?} and {b:?} adjacent");
            }
        }
    }

    #[test]
    fn lms_self_score_is_one_and_bounded(seg in in_image_segment(320.0, 240.0), other in in_image_segment(320.0, 240.0)) {
        let cfg = MetricConfig::default();
        let self_score = lms(&seg, &seg, 320, 240, &cfg).unwrap();
        prop_assert_eq!(self_score, 1.0);
        let cross = lms(&seg, &other, 320, 240, &cfg).unwrap();
        prop_assert!((0.0..=1.0).contains(&cross));
    }

    #[test]
    fn sse_equals_bruteforce_enumeration(a in in_image_segment(128.0, 128.0), b in in_image_segment(128.0, 128.0)) {
        let got = sse(&a, &b);
        // Explicit enumeration over both endpoint pairings.
        let d2 = |p: Point2, q: Point2| (p.x - q.x).powi(2) + (p.y - q.y).powi(2);
        let mut best = f64::INFINITY;
        for (gs, ge) in [(b.start(), b.end()), (b.end(), b.start())] {
            let total = d2(a.start(), gs) + d2(a.end(), ge);
            if total < best {
                best = total;
            }
        }
        prop_assert_eq!(got, best);
    }

    #[test]
    fn lms_is_scale_invariant(
        pred in in_image_segment(100.0, 80.0),
        gt in in_image_segment(100.0, 80.0),
        fx in 1u32..5,
        fy in 1u32..5,
    ) {
        let cfg = MetricConfig::default();
        let base = lms(&pred, &gt, 100, 80, &cfg).unwrap();
        let scale = |s: &LineSegment| {
            LineSegment::new(
                Point2::new(s.start().x * fx as f64, s.start().y * fy as f64),
                Point2::new(s.end().x * fx as f64, s.end().y * fy as f64),
                s.confidence(),
            )
            .unwrap()
        };
        let scaled = lms(&scale(&pred), &scale(&gt), 100 * fx, 80 * fy, &cfg).unwrap();
        prop_assert!((base - scaled).abs() < 1e-9, "base {base} scaled {scaled}");
    }

    #[test]
    fn score_theta_is_translation_covariant(
        pred in in_image_segment(128.0, 128.0),
        gt in in_image_segment(128.0, 128.0),
        tx in -40.0..40.0f64,
        ty in -40.0..40.0f64,
    ) {
        let cfg = MetricConfig::default();
        let shift = |s: &LineSegment| {
            LineSegment::new(
                Point2::new(s.start().x + tx, s.start().y + ty),
                Point2::new(s.end().x + tx, s.end().y + ty),
                1.0,
            )
            .unwrap()
        };
        let base = score_theta(&pred, &gt, &cfg);
        let moved = score_theta(&shift(&pred), &shift(&gt), &cfg);
        prop_assert!((base - moved).abs() < 1e-9, "base {base} moved {moved}");
    }

    #[test]
    fn losses_are_non_negative(
        pairs in proptest::collection::vec((0.0..=1.0f64, 0.0..=1.0f64), 1..64),
        pos_weight in 0.0..100.0f64,
    ) {
        let n = pairs.len();
        let (pred, target): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let pred = ScalarMap::from_values(n, 1, pred).unwrap();
        let target = ScalarMap::from_values(n, 1, target).unwrap();
        let loss = lseval_core::gtmaps::weighted_bce(&pred, &target, pos_weight).unwrap();
        prop_assert!(loss >= 0.0, "bce {loss}");
    }

    #[test]
    fn smooth_l1_is_non_negative(
        offsets in proptest::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 1..16),
    ) {
        use lseval_core::map::DisplacementField;
        let mut target = DisplacementField::zeros(16, 16);
        let mut pred = DisplacementField::zeros(16, 16);
        for (i, (dx, dy)) in offsets.iter().enumerate() {
            let (x, y) = (i % 16, i / 16);
            target.set(x, y, Vec2::new(1.0, 2.0), Vec2::new(-1.0, -2.0));
            pred.set(x, y, Vec2::new(1.0 + dx, 2.0 + dy), Vec2::new(-1.0, -2.0));
        }
        let loss = lseval_core::gtmaps::masked_smooth_l1(&pred, &target).unwrap();
        prop_assert!(loss >= 0.0, "smooth l1 {loss}");
    }

    #[test]
    fn ap_monotone_under_injected_false_positive(
        seed in 0u64..500,
        n in 1usize..6,
    ) {
        let cfg = MetricConfig::default();
        let ann = lseval_core::synth::generate_scene(n, 320, 320, seed);
        prop_assume!(ann.segments.len() == n);
        let gts = annotation_set(vec![ann.clone()]).unwrap();
        let dets: Vec<Detection> = ann
            .segments
            .iter()
            .enumerate()
            .map(|(i, s)| Detection {
                image_id: ann.image_id.clone(),
                segment: s.with_confidence(0.4 + 0.1 * (i % 5) as f64).unwrap(),
            })
            .collect();
        let criterion = MatchCriterion::Lms { min_score: cfg.lms_tp_threshold };
        let curve = match_and_ap(&dets, &gts, &criterion, &cfg).unwrap();
        for pair in curve.points.windows(2) {
            prop_assert!(pair[0].recall <= pair[1].recall, "recalls must not decrease");
        }
        prop_assert!((0.0..=1.0).contains(&curve.ap));
        let base = curve.ap;
        // Inject a far-off detection outranking everything.
        let mut with_fp = dets.clone();
        with_fp.push(Detection {
            image_id: ann.image_id.clone(),
            segment: LineSegment::new(Point2::new(1.0, 1.0), Point2::new(2.0, 317.0), 1.0).unwrap(),
        });
        let worse = match_and_ap(&with_fp, &gts, &criterion, &cfg).unwrap().ap;
        prop_assert!(worse <= base + 1e-12, "base {base} worse {worse}");
    }
}

#[test]
fn score_theta_one_iff_collinear() {
    let cfg = MetricConfig::default();
    let gt = LineSegment::new(Point2::new(20.0, 30.0), Point2::new(100.0, 70.0), 1.0).unwrap();
    // Collinear extension beyond the ground truth.
    let dir = gt.direction();
    let collinear = LineSegment::new(gt.end() + dir * 5.0, gt.end() + dir * 30.0, 1.0).unwrap();
    assert!(score_theta(&collinear, &gt, &cfg) > 1.0 - 1e-6);
    // A parallel but offset segment is not collinear.
    let offset = LineSegment::new(
        Point2::new(gt.start().x, gt.start().y + 8.0),
        Point2::new(gt.end().x, gt.end().y + 8.0),
        1.0,
    )
    .unwrap();
    assert!(score_theta(&offset, &gt, &cfg) < 1.0 - 1e-6);
}

/// Exhaustive one-to-one assignment maximizing the number of matched
/// detections, used as the optimality oracle for greedy matching.
fn optimal_tp_count(feasible: &[Vec<bool>], n_gt: usize) -> usize {
    fn recurse(feasible: &[Vec<bool>], det: usize, used: &mut [bool]) -> usize {
        if det == feasible.len() {
            return 0;
        }
        // Leave this detection unmatched.
        let mut best = recurse(feasible, det + 1, used);
        for gi in 0..used.len() {
            if feasible[det][gi] && !used[gi] {
                used[gi] = true;
                best = best.max(1 + recurse(feasible, det + 1, used));
                used[gi] = false;
            }
        }
        best
    }
    recurse(feasible, 0, &mut vec![false; n_gt])
}

#[test]
fn greedy_matches_optimal_when_gts_are_incompatible() {
    // Well-separated ground truth makes every detection compatible with at
    // most one segment, where greedy assignment is provably optimal.
    let cfg = MetricConfig::default();
    let criterion = MatchCriterion::Lms {
        min_score: cfg.lms_tp_threshold,
    };
    for seed in 0..40u64 {
        let ann = lseval_core::synth::generate_scene(5, 320, 320, seed);
        let gts = annotation_set(vec![ann.clone()]).unwrap();
        let spec = lseval_core::synth::PerturbSpec {
            rotate_deg: 1.5,
            translate: [0.5, -0.5],
            confidence: 0.9,
            ..Default::default()
        };
        let mut dets = lseval_core::synth::perturb(&ann, &spec).unwrap();
        // A couple of far-away false positives.
        dets.push(Detection {
            image_id: ann.image_id.clone(),
            segment: LineSegment::new(Point2::new(1.0, 1.0), Point2::new(2.0, 318.0), 0.95)
                .unwrap(),
        });

        let feasible: Vec<Vec<bool>> = dets
            .iter()
            .map(|d| {
                ann.segments
                    .iter()
                    .map(|g| {
                        criterion
                            .match_quality(&d.segment, g, 320, 320, &cfg)
                            .unwrap()
                            .is_some()
                    })
                    .collect()
            })
            .collect();
        // Verify the premise: each detection matches at most one segment.
        for row in &feasible {
            assert!(row.iter().filter(|f| **f).count() <= 1);
        }

        let curve = match_and_ap(&dets, &gts, &criterion, &cfg).unwrap();
        let total_gt = ann.segments.len();
        let greedy_tp = curve
            .points
            .last()
            .map(|p| (p.recall * total_gt as f64).round() as usize)
            .unwrap_or(0);
        assert_eq!(greedy_tp, optimal_tp_count(&feasible, total_gt));
    }
}

#[test]
fn rescale_examples() {
    let cfg = MetricConfig::default();
    let seg = LineSegment::new(Point2::new(0.0, 0.0), Point2::new(320.0, 320.0), 1.0).unwrap();
    let scaled = rescale_to_eval(&seg, 320, 320, &cfg).unwrap();
    assert_eq!(scaled.end(), Point2::new(128.0, 128.0));
}

#[test]
fn lms_rotation_monotonicity_probe() {
    // Increasing rotation leaves LMS non-increasing and drives it to zero
    // once the angle threshold is crossed.
    let cfg = MetricConfig::default();
    let ann = lseval_core::synth::generate_scene(12, 320, 320, 21);
    for seg in &ann.segments {
        let mut prev = f64::INFINITY;
        for step in 0..=15 {
            let spec = lseval_core::synth::PerturbSpec {
                rotate_deg: step as f64,
                ..Default::default()
            };
            let single = Annotation::new("x".into(), 320, 320, vec![*seg]).unwrap();
            let dets = lseval_core::synth::perturb(&single, &spec).unwrap();
            assert_eq!(dets.len(), 1);
            let score = lms(&dets[0].segment, seg, 320, 320, &cfg).unwrap();
            assert!(
                score <= prev + 1e-9,
                "rotation {step} raised LMS from {prev} to {score}"
            );
            prev = score;
        }
        // Past the angle threshold the score must be zero. Rotation about
        // the midpoint moves the plane normal by the same angle.
        let spec = lseval_core::synth::PerturbSpec {
            rotate_deg: 15.0,
            ..Default::default()
        };
        let single = Annotation::new("x".into(), 320, 320, vec![*seg]).unwrap();
        let dets = lseval_core::synth::perturb(&single, &spec).unwrap();
        assert_eq!(lms(&dets[0].segment, seg, 320, 320, &cfg).unwrap(), 0.0);
    }
}
