//! Criterion benchmarks of the spectral kernels live in `benches/`.
