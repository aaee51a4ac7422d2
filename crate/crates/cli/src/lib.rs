//! Library surface of the benchmark runner: config schema, experiment
//! drivers, and report writers. The binary in `main.rs` is a thin CLI over
//! these; the acceptance suite drives them directly.

pub mod config;
pub mod report;
pub mod spca;
pub mod ssc;
