//! Criterion benchmarks for the evaluation kernels live under `benches/`.
