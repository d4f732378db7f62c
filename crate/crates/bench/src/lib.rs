//! Criterion benchmarks for `sjg-core`; run with `cargo bench -p sjg-bench`.
