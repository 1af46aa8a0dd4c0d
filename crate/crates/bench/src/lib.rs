//! Criterion benchmarks for `exchange-teleport`; see `benches/`.
