//! Benchmark-only crate; the measurements live in `benches/solvers.rs`.
//!
//! This library target is intentionally empty — it exists so the Criterion
//! bench target has a package to live in without weighing down the core
//! crate's dependency graph.
