//! Criterion benchmarks for the mvopls solvers; see `benches/`.
