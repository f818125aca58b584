//! Benchmark crate: no library code of its own, see `benches/solvers.rs`.
