//! Criterion benchmarks for the decoding library live in `benches/`.
