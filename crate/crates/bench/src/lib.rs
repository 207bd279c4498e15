//! Criterion benchmarks for the rootscan miners live under `benches/`.
