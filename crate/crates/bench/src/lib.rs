//! Criterion benchmarks for the routing engine. See `benches/`.
