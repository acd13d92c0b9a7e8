//! Criterion benchmarks for `otto-core`; see `benches/`.
