//! File formats, report emission, and command implementations behind the
//! `lseval` binary.

pub mod commands;
pub mod error;
pub mod lstn;
pub mod records;
pub mod report;
