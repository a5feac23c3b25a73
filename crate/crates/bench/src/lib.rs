//! Criterion benchmarks for `damrisk-core`; run with `cargo bench -p damrisk-bench`.
