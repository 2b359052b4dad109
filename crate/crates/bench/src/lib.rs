//! Criterion benchmarks for ctlhorn live under `benches/`.
