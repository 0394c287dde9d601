//! Shared fixtures for the benchmarks.

use nichewave_core::{build_grid, rescale_kernel, DiscreteOperator, GrowthProfile, Kernel, Topology};

/// Tent-kernel operator with `n` points on `[-10, 10]`, range `eps` and a
/// bump growth profile.
pub fn fixture(n: usize, eps: f64) -> DiscreteOperator {
    let grid = build_grid(1, 10.0, 20.0 / n as f64, Topology::BallTruncated).expect("valid grid");
    let kernel = rescale_kernel(&Kernel::tent(1), eps, 0.0, 1.0).expect("valid scaling");
    let a = GrowthProfile::bump(1.5, 1.0, -1.0).sample(&grid);
    DiscreteOperator::new(&grid, &kernel, a).expect("valid operator")
}

/// Deterministic smooth test vector of length `n`.
pub fn test_vector(n: usize) -> Vec<f64> {
    (0..n).map(|i| 1.0 + (0.37 * i as f64).sin()).collect()
}
