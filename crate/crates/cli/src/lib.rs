//! Library half of the `dirichlet-lab` binary: scenario files, report
//! formatting, and check execution. Split out so integration tests can
//! drive everything without spawning a process.

// Validation deliberately writes `!(x > 0.0)` instead of `x <= 0.0`: the
// negated form is false for NaN, so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod report;
pub mod run;
pub mod scenario;
