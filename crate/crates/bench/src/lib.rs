//! Criterion benchmarks for `bellctx`. See `benches/`.
