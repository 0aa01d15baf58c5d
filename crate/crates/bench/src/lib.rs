//! Benchmark-only crate; see `benches/design.rs`.
