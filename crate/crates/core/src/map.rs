//! Dense per-pixel maps: scalar grids and four-channel displacement fields.

use crate::error::{Error, Result};
use crate::geom::Vec2;

/// Row-major grid of reals (confidence or segmentation values).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ScalarMap {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            values: vec![0.0; width * height],
        }
    }

    /// Wraps row-major `values`; length must equal `width * height` and
    /// every entry must be finite.
    pub fn from_values(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::InvalidValue(format!(
                "scalar map of {}x{} needs {} values, got {}",
                width,
                height,
                width * height,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("scalar map value"));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    fn idx(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y * self.width + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[self.idx(x, y)]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        let i = self.idx(x, y);
        self.values[i] = value;
    }

    pub fn same_dims(&self, other: &ScalarMap) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn check_same_dims(&self, other: &ScalarMap) -> Result<()> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(Error::dims(
                (self.width, self.height),
                (other.width, other.height),
            ))
        }
    }

    /// Checks that every value lies in `[0, 1]`, as probability maps require.
    pub fn validate_probabilities(&self, context: &str) -> Result<()> {
        for (i, v) in self.values.iter().enumerate() {
            if !(0.0..=1.0).contains(v) {
                return Err(Error::InvalidValue(format!(
                    "{context}: value {v} at index {i} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Four displacement channels (start dx/dy, end dx/dy) with a validity mask.
///
/// Channel values are meaningful only where `valid` is set; construction
/// requires them to be finite there.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementField {
    width: usize,
    height: usize,
    dx_start: Vec<f64>,
    dy_start: Vec<f64>,
    dx_end: Vec<f64>,
    dy_end: Vec<f64>,
    valid: Vec<bool>,
}

impl DisplacementField {
    pub fn zeros(width: usize, height: usize) -> Self {
        let n = width * height;
        Self {
            width,
            height,
            dx_start: vec![0.0; n],
            dy_start: vec![0.0; n],
            dx_end: vec![0.0; n],
            dy_end: vec![0.0; n],
            valid: vec![false; n],
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn from_channels(
        width: usize,
        height: usize,
        dx_start: Vec<f64>,
        dy_start: Vec<f64>,
        dx_end: Vec<f64>,
        dy_end: Vec<f64>,
        valid: Vec<bool>,
    ) -> Result<Self> {
        let n = width * height;
        for (name, chan) in [
            ("dx_start", &dx_start),
            ("dy_start", &dy_start),
            ("dx_end", &dx_end),
            ("dy_end", &dy_end),
        ] {
            if chan.len() != n {
                return Err(Error::InvalidValue(format!(
                    "displacement channel {name} has {} values, field is {width}x{height}",
                    chan.len()
                )));
            }
        }
        if valid.len() != n {
            return Err(Error::InvalidValue(format!(
                "validity mask has {} entries, field is {width}x{height}",
                valid.len()
            )));
        }
        for i in 0..n {
            if valid[i]
                && !(dx_start[i].is_finite()
                    && dy_start[i].is_finite()
                    && dx_end[i].is_finite()
                    && dy_end[i].is_finite())
            {
                return Err(Error::NonFinite("displacement value at valid pixel"));
            }
        }
        Ok(Self {
            width,
            height,
            dx_start,
            dy_start,
            dx_end,
            dy_end,
            valid,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    fn idx(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y * self.width + x
    }

    #[inline]
    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.valid[self.idx(x, y)]
    }

    /// Displacements to the start- and end-point at a valid pixel.
    pub fn get(&self, x: usize, y: usize) -> Option<(Vec2, Vec2)> {
        if self.is_valid(x, y) {
            Some(self.raw_at(x, y))
        } else {
            None
        }
    }

    /// Channel values regardless of validity. Loss evaluation reads dense
    /// predictions through this.
    pub fn raw_at(&self, x: usize, y: usize) -> (Vec2, Vec2) {
        let i = self.idx(x, y);
        (
            Vec2::new(self.dx_start[i], self.dy_start[i]),
            Vec2::new(self.dx_end[i], self.dy_end[i]),
        )
    }

    /// Writes all four channels at a pixel and marks it valid.
    pub fn set(&mut self, x: usize, y: usize, disp_start: Vec2, disp_end: Vec2) {
        let i = self.idx(x, y);
        self.dx_start[i] = disp_start.x;
        self.dy_start[i] = disp_start.y;
        self.dx_end[i] = disp_end.x;
        self.dy_end[i] = disp_end.y;
        self.valid[i] = true;
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }

    /// Channels in order dx_start, dy_start, dx_end, dy_end.
    pub fn channels(&self) -> [&[f64]; 4] {
        [&self.dx_start, &self.dy_start, &self.dx_end, &self.dy_end]
    }

    pub fn validity(&self) -> &[bool] {
        &self.valid
    }

    pub fn check_matches(&self, map: &ScalarMap) -> Result<()> {
        if self.width == map.width() && self.height == map.height() {
            Ok(())
        } else {
            Err(Error::dims(
                (map.width(), map.height()),
                (self.width, self.height),
            ))
        }
    }

    pub fn check_same_dims(&self, other: &DisplacementField) -> Result<()> {
        if self.width == other.width && self.height == other.height {
            Ok(())
        } else {
            Err(Error::dims(
                (self.width, self.height),
                (other.width, other.height),
            ))
        }
    }
}
