//! Tri-point line segment tooling: encode segments as a root point plus
//! endpoint displacements, decode dense detector maps back into vectorized
//! segments, build ground-truth training maps with their losses, and score
//! detections with a full metric suite (pixel F-score, structural AP, and
//! line-matching AP).
//!
//! - [`geom`] — points, canonical segments, tri-point conversions
//! - [`map`] — dense scalar maps and displacement fields
//! - [`decode`] — point filter, non-maximum suppression, tri-point decode
//! - [`gtmaps`] — ground-truth map construction and training losses
//! - [`metrics`] — pairwise scores, greedy matching, PR curves, reports
//! - [`synth`] — seeded scene generation, perturbations, metric oracles
//!
//! All types are immutable after construction and all operations are pure;
//! per-image work parallelizes with deterministic, worker-count-independent
//! results.

pub mod decode;
pub mod error;
pub mod geom;
pub mod gtmaps;
pub mod map;
pub mod metrics;
pub mod raster;
pub mod synth;

pub use error::{Error, Result};
