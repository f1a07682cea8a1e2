//! Shared fixtures for the benchmarks.

use slowtorus_core::{build, ConstantsProfile, ConstructionState, PrecisionPolicy};

/// Depth-2 PAPER-mode state for `φ(x) = 2 + log2(1 + x)`.
pub fn reference() -> ConstructionState {
    build(
        &"log2:2,1".parse().unwrap(),
        2,
        &ConstantsProfile::paper(),
        &PrecisionPolicy::new(128, 1024),
    )
    .expect("reference build")
    .0
}

/// DESK-mode state for `φ(x) = 2 + sqrt(x)`.
pub fn desk(depth: usize) -> ConstructionState {
    build(
        &"power:2,1,1/2".parse().unwrap(),
        depth,
        &ConstantsProfile::desk(),
        &PrecisionPolicy::new(128, 1024),
    )
    .expect("desk build")
    .0
}
