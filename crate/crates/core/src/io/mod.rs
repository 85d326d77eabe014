//! Instance files, generators and the benchmark harness.

pub mod bench;
pub mod dimacs;
pub mod generate;
