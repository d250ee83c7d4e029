//! Criterion benchmarks for the simulation, timing and fitness kernels; see `benches/`.
