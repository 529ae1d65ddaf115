//! 2D points, vectors, canonical line segments, and the tri-point encoding.
//!
//! A tri-point encodes a segment as a root point (its midpoint) plus two
//! displacement vectors to the endpoints. [`tp_to_segment`] and
//! [`segment_to_tp`] convert between the two encodings and invert each
//! other up to floating-point rounding.
//!
//! All values are immutable after construction and all operations are pure.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A point in image coordinates. Pixels; y grows downward.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// A 2D displacement in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Sub for Point2 {
    type Output = Vec2;
    fn sub(self, rhs: Point2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Add<Vec2> for Point2 {
    type Output = Point2;
    fn add(self, rhs: Vec2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub<Vec2> for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Vec2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x / rhs, self.y / rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// A vectorized line segment with canonical endpoint order.
///
/// The start-point is the leftmost endpoint; for vertical segments it is
/// the upper one (smaller y in image coordinates). Construction rejects
/// coincident endpoints and non-finite values, so every value of this type
/// has positive length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSegment {
    start: Point2,
    end: Point2,
    confidence: f64,
}

impl LineSegment {
    /// Builds a segment from two endpoints given in either order.
    ///
    /// `confidence` must lie in `[0, 1]`; use 1.0 where no detector score
    /// applies (ground truth).
    pub fn new(a: Point2, b: Point2, confidence: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFinite("segment endpoint"));
        }
        if !confidence.is_finite() || !(0.0..=1.0).contains(&confidence) {
            return Err(Error::InvalidValue(format!(
                "confidence {confidence} outside [0, 1]"
            )));
        }
        if a == b {
            return Err(Error::DegenerateSegment { x: a.x, y: a.y });
        }
        // Lexicographic (x, y) order: leftmost first, upper first on ties.
        let (start, end) = if (a.x, a.y) < (b.x, b.y) { (a, b) } else { (b, a) };
        Ok(Self {
            start,
            end,
            confidence,
        })
    }

    pub fn start(&self) -> Point2 {
        self.start
    }

    pub fn end(&self) -> Point2 {
        self.end
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    /// Same geometry with a different confidence.
    pub fn with_confidence(&self, confidence: f64) -> Result<Self> {
        Self::new(self.start, self.end, confidence)
    }

    /// Euclidean length; positive for every constructed segment.
    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }

    /// Arithmetic midpoint of the endpoints.
    pub fn midpoint(&self) -> Point2 {
        Point2::new(
            (self.start.x + self.end.x) / 2.0,
            (self.start.y + self.end.y) / 2.0,
        )
    }

    /// Unit vector from start to end.
    pub fn direction(&self) -> Vec2 {
        (self.end - self.start) / self.length()
    }
}

/// Orders two endpoints canonically into a segment. The point set `{a, b}`
/// is preserved exactly; only the ordering may change.
pub fn canonicalize(a: Point2, b: Point2, confidence: f64) -> Result<LineSegment> {
    LineSegment::new(a, b, confidence)
}

/// A root point plus displacement vectors to the two segment endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriPoint {
    root: Point2,
    disp_start: Vec2,
    disp_end: Vec2,
    score: f64,
}

impl TriPoint {
    pub fn new(root: Point2, disp_start: Vec2, disp_end: Vec2, score: f64) -> Result<Self> {
        if !root.is_finite() || !disp_start.is_finite() || !disp_end.is_finite() {
            return Err(Error::NonFinite("tri-point component"));
        }
        if !score.is_finite() || !(0.0..=1.0).contains(&score) {
            return Err(Error::InvalidValue(format!("score {score} outside [0, 1]")));
        }
        if disp_start == disp_end {
            return Err(Error::DegenerateSegment {
                x: root.x + disp_start.x,
                y: root.y + disp_start.y,
            });
        }
        Ok(Self {
            root,
            disp_start,
            disp_end,
            score,
        })
    }

    pub fn root(&self) -> Point2 {
        self.root
    }

    pub fn disp_start(&self) -> Vec2 {
        self.disp_start
    }

    pub fn disp_end(&self) -> Vec2 {
        self.disp_end
    }

    pub fn score(&self) -> f64 {
        self.score
    }
}

/// Converts a tri-point into its vectorized segment: endpoints are
/// `root + disp_start` and `root + disp_end`, canonicalized. Errors if the
/// two computed endpoints coincide.
pub fn tp_to_segment(tp: &TriPoint) -> Result<LineSegment> {
    LineSegment::new(
        tp.root + tp.disp_start,
        tp.root + tp.disp_end,
        tp.score,
    )
}

/// Encodes a segment as a tri-point rooted at its midpoint. Inverse of
/// [`tp_to_segment`] up to floating-point epsilon.
pub fn segment_to_tp(seg: &LineSegment) -> TriPoint {
    let root = seg.midpoint();
    TriPoint {
        root,
        disp_start: seg.start() - root,
        disp_end: seg.end() - root,
        score: seg.confidence(),
    }
}
