//! Criterion benches for the moment engines and samplers; see `benches/moments.rs`.
