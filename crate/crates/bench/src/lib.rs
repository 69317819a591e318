//! Criterion benchmarks for the omega-ktree samplers and distance routines.
//! See `benches/`.
