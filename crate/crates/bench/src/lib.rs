//! Criterion benchmarks for `cdc-core`. Run with `cargo bench -p cdc-bench`.
