//! Criterion benchmarks for the bound computations; see `benches/bounds.rs`.
