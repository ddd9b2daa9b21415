//! Criterion benchmarks for `satrans-core`; see `benches/`.
