//! Benchmarks for the period-matrix pipeline live in `benches/`.
