//! Seeded workloads shared by the `diameter` benchmark.
//!
//! Each workload fixes the instance family and density so timings at
//! different sizes are comparable: the sampling box grows with `√n` so the
//! expected number of neighbors per shape stays constant.

use geodiam_core::{random, Point, Shape};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed used by every workload.
pub const SEED: u64 = 0x6765_6f64;

fn rng(n: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ n as u64)
}

/// Disk centers in a box of side 3, the regime where the diameter-2
/// question is undecided by trivial bounds.
pub fn disk_centers(n: usize) -> Vec<Point> {
    random::points_in_box(n, 3.0, &mut rng(n))
}

/// Square centers in a box of side 3.
pub fn square_centers(n: usize) -> Vec<Point> {
    random::points_in_box(n, 3.0, &mut rng(n))
}

/// Half-grid segments with three slopes at constant density.
pub fn segments(n: usize) -> Vec<Shape> {
    let side = (n as f64).sqrt().max(2.0);
    random::grid_segments(n, 3, side, &mut rng(n))
}

/// Unit disks at constant density (for the oracle graph build).
pub fn sparse_disks(n: usize) -> Vec<Shape> {
    let side = (n as f64).sqrt();
    random::unit_disks(n, side, &mut rng(n))
}
