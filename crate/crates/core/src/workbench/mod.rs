//! Exhaustive enumeration, property sweeps, and DOT export.

mod dot;
mod enumerate;
mod sweep;

pub use dot::{export_dot, export_labeled_dot};
pub use enumerate::{enumerate_codes, enumerate_symmetric_trees, symmetric_forms, CodeFilter, UnknownFilter};
pub use sweep::{run_sweep, Bounds, Failure, Property, SweepError, SweepReport, UnknownProperty};
