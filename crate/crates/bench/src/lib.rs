//! Criterion benchmarks for the ontoforge pipeline; see `benches/`.
