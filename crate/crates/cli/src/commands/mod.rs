//! The five benchmark subcommands.

pub mod cov_error;
pub mod demo_predict;
pub mod kriging_bench;
pub mod selftest;
pub mod taper_sweep;
