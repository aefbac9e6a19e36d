//! Command-line front end for the `lgmm` solver: benchmark presets,
//! configuration resolution, experiment commands, pinned reference results,
//! and the acceptance gate that checks fresh runs against them.

// Guards written as `!(x > 0.0)` are deliberate: unlike `x <= 0.0` they also
// reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod presets;
pub mod reference;
pub mod tolerances;
