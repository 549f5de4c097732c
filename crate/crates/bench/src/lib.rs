//! Criterion benchmarks of the simulator's hot kernels; see `benches/`.
