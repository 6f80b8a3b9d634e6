//! Experiment harness: scans, exponent fits and refinement studies.

pub mod experiments;
pub mod output;
pub mod scan;

pub use experiments::*;
pub use scan::*;
