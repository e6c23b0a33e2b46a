//! Benchmarks for scaffold-core; see `benches/`.
