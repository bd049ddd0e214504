//! Command-line orchestration for the `beveridge-gap` library.
//!
//! The binary is a thin wrapper over [`cli::run`]; the analysis stages in
//! [`pipeline`] are public so tests can drive them without a subprocess.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod config;
pub mod pipeline;
pub mod svg;
