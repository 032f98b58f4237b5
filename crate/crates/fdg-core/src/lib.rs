//! Fast differential grouping for large-scale black-box optimization.
//!
//! The decomposition pipeline identifies whether a bounded black-box
//! function is fully separable, partially separable, or nonseparable, and
//! recovers its nonseparable variable groups with a near-minimal number of
//! fitness evaluations:
//!
//! * [`indicator`] — the normalized interdependency indicator over variable
//!   subsets, with roundoff correction and adaptive threshold judgment.
//! * [`idap`] — distribution analysis of indicator values; finds the outlier
//!   gap that separates separable from nonseparable evidence.
//! * [`itip`] — instance-type identification from a few probe pairs.
//! * [`btdp`] — binary-tree search for the variables interacting with a
//!   subset, reusing evaluated solutions across tree nodes.
//! * [`psdp`] — separable-variable exclusion plus the grouping loop.
//! * [`fdg`] — the driver tying the phases together.
//!
//! Around the pipeline: [`benchmarks`] builds synthetic objectives with
//! known ground truth, [`analysis`] holds the pairwise oracle, the NMI
//! accuracy metric, and the selection-probability formulas, [`cc`] runs
//! cooperative coevolution over a decomposition, and [`cli`] is the
//! experiment runner behind the `fdg` binary.

pub mod analysis;
pub mod benchmarks;
pub mod btdp;
pub mod cc;
pub mod cli;
pub mod error;
pub mod fdg;
pub mod idap;
pub mod indicator;
pub mod itip;
pub mod problem;
pub mod psdp;
pub mod verify;

pub use error::{FdgError, Result};
pub use fdg::{decompose, FdgConfig, FdgOutcome};
pub use idap::SeparabilityType;
pub use indicator::{Thresholds, MACHINE_EPSILON};
pub use problem::{compose, EvaluationLedger, ObjectiveProblem, Solution};
pub use psdp::Decomposition;
