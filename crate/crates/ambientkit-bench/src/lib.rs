//! Benchmark-only crate; see `benches/exact_kernels.rs`.
