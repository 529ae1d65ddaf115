//! Decoding dense detector-style maps into vectorized line segments.
//!
//! The pipeline is: filter the root confidence map with the line map
//! ([`point_filter`]), extract peak pixels ([`nms_peaks`]), then read the
//! displacement field at each peak and convert the resulting tri-point to
//! a segment ([`decode`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{tp_to_segment, LineSegment, Point2, TriPoint};
use crate::map::{DisplacementField, ScalarMap};

/// Decoding knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecodeConfig {
    /// Power applied to the line map before it multiplies the root map.
    pub alpha: f64,
    /// Minimum filtered confidence for a peak to become a detection.
    /// Values above 1 are accepted and simply yield no detections.
    pub confidence_threshold: f64,
    /// Side of the square NMS neighborhood; odd, at least 3.
    pub nms_window: usize,
    /// Upper bound on returned detections.
    pub max_detections: usize,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            confidence_threshold: 0.2,
            nms_window: 3,
            max_detections: 1000,
        }
    }
}

impl DecodeConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidValue(format!(
                "alpha {} outside [0, 1]",
                self.alpha
            )));
        }
        if !self.confidence_threshold.is_finite() || self.confidence_threshold < 0.0 {
            return Err(Error::InvalidValue(format!(
                "confidence threshold {} must be finite and non-negative",
                self.confidence_threshold
            )));
        }
        if self.nms_window < 3 || self.nms_window.is_multiple_of(2) {
            return Err(Error::InvalidValue(format!(
                "NMS window {} must be odd and >= 3",
                self.nms_window
            )));
        }
        Ok(())
    }
}

/// Per-pixel product of the root map with the line map raised to `alpha`.
///
/// Output values stay in `[0, 1]` and never exceed the input root values.
pub fn point_filter(
    root_given_line: &ScalarMap,
    line: &ScalarMap,
    alpha: f64,
) -> Result<ScalarMap> {
    root_given_line.check_same_dims(line)?;
    let values = root_given_line
        .values()
        .iter()
        .zip(line.values())
        .map(|(r, l)| r * l.powf(alpha))
        .collect();
    ScalarMap::from_values(root_given_line.width(), root_given_line.height(), values)
}

/// Pixels that are maximal over their `window`-sized square neighborhood
/// and reach `threshold`, sorted by score descending and truncated to
/// `max_detections`.
///
/// Equal-valued maxima inside one window keep only the pixel with the
/// smaller (row, col) index, so results are deterministic.
pub fn nms_peaks(
    map: &ScalarMap,
    window: usize,
    threshold: f64,
    max_detections: usize,
) -> Vec<(Point2, f64)> {
    assert!(window % 2 == 1 && window >= 3, "NMS window must be odd and >= 3");
    let radius = window / 2;
    let (w, h) = (map.width(), map.height());
    let mut peaks = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let v = map.get(x, y);
            if v < threshold {
                continue;
            }
            let y_lo = y.saturating_sub(radius);
            let y_hi = (y + radius).min(h.saturating_sub(1));
            let x_lo = x.saturating_sub(radius);
            let x_hi = (x + radius).min(w.saturating_sub(1));
            let mut is_peak = true;
            'window: for ny in y_lo..=y_hi {
                for nx in x_lo..=x_hi {
                    let nv = map.get(nx, ny);
                    if nv > v || (nv == v && (ny, nx) < (y, x)) {
                        is_peak = false;
                        break 'window;
                    }
                }
            }
            if is_peak {
                peaks.push((Point2::new(x as f64, y as f64), v));
            }
        }
    }
    // Stable sort keeps raster order among equal scores.
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
    peaks.truncate(max_detections);
    peaks
}

/// Segments decoded from one set of maps, plus skip counters.
#[derive(Debug, Clone, Default)]
pub struct Decoded {
    pub segments: Vec<LineSegment>,
    /// Peaks whose displacement pixel carried no valid data.
    pub skipped_invalid: usize,
    /// Peaks whose displacements produced a zero-length segment.
    pub skipped_degenerate: usize,
}

/// Full decode: point filter, NMS, tri-point generation.
///
/// Peaks on invalid displacement pixels or yielding degenerate segments are
/// counted and skipped rather than failing the whole decode.
pub fn decode(
    root_given_line: &ScalarMap,
    line: &ScalarMap,
    disp: &DisplacementField,
    cfg: &DecodeConfig,
) -> Result<Decoded> {
    cfg.validate()?;
    root_given_line.check_same_dims(line)?;
    disp.check_matches(root_given_line)?;
    root_given_line.validate_probabilities("root confidence map")?;
    line.validate_probabilities("line map")?;

    let filtered = point_filter(root_given_line, line, cfg.alpha)?;
    let peaks = nms_peaks(
        &filtered,
        cfg.nms_window,
        cfg.confidence_threshold,
        cfg.max_detections,
    );

    let mut out = Decoded::default();
    for (root, score) in peaks {
        let (x, y) = (root.x as usize, root.y as usize);
        let Some((disp_start, disp_end)) = disp.get(x, y) else {
            out.skipped_invalid += 1;
            continue;
        };
        let seg = TriPoint::new(root, disp_start, disp_end, score)
            .and_then(|tp| tp_to_segment(&tp));
        match seg {
            Ok(s) => out.segments.push(s),
            Err(_) => out.skipped_degenerate += 1,
        }
    }
    Ok(out)
}
