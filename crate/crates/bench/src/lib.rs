//! Benchmarks for the landscape-analysis library live in `benches/`.
