//! Criterion benchmarks for `interdiv-core`; see `benches/`.
