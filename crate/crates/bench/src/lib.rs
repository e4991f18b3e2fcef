//! Criterion benchmarks for the numerics and the capital simulation live in `benches/`.
