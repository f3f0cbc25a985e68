//! Seeded random instances for tests, verification runs and benchmarks.

use rand::Rng;

use crate::geometry::{Point, Shape, SlopeTable};

/// `n` points uniform in the square `[0, side]²`.
pub fn points_in_box(n: usize, side: f64, rng: &mut impl Rng) -> Vec<Point> {
    (0..n).map(|_| Point::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side))).collect()
}

/// Unit disks with centers uniform in `[0, side]²`.
pub fn unit_disks(n: usize, side: f64, rng: &mut impl Rng) -> Vec<Shape> {
    points_in_box(n, side, rng).into_iter().map(|center| Shape::UnitDisk { center }).collect()
}

/// Unit squares with centers uniform in `[0, side]²`.
pub fn unit_squares(n: usize, side: f64, rng: &mut impl Rng) -> Vec<Shape> {
    points_in_box(n, side, rng).into_iter().map(|center| Shape::UnitSquare { center }).collect()
}

/// Segments of the first `h` default slopes with endpoints on the half-grid
/// of `[0, side]²` and lengths in `{0.5, 1, …, 3}`. The coarse grid makes
/// collinear overlaps of same-slope segments frequent.
pub fn grid_segments(n: usize, h: usize, side: f64, rng: &mut impl Rng) -> Vec<Shape> {
    let table = SlopeTable::first(h.clamp(1, 3)).expect("h in 1..=3");
    let steps = (side * 2.0).max(1.0) as i32;
    (0..n)
        .map(|_| {
            let c = rng.gen_range(1..=table.len() as u32);
            let a = Point::new(rng.gen_range(0..=steps) as f64 / 2.0, rng.gen_range(0..=steps) as f64 / 2.0);
            let len = rng.gen_range(1..=6) as f64 / 2.0;
            let b = a.add(table.direction(c).expect("registered class").scale(len));
            Shape::Segment { a, b, slope_class: c }
        })
        .collect()
}

/// Horizontal (class 1) and vertical (class 2) segments with continuous
/// random coordinates in `[0, side]²` and lengths in `[min_len, max_len]`.
/// Same-slope segments almost surely lie on distinct lines, so the graph is
/// bipartite and the instance non-degenerate.
pub fn bipartite_segments(n: usize, side: f64, min_len: f64, max_len: f64, rng: &mut impl Rng) -> Vec<Shape> {
    (0..n)
        .map(|i| {
            let a = Point::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side));
            let len = rng.gen_range(min_len..=max_len);
            if i % 2 == 0 {
                Shape::Segment { a, b: Point::new(a.x + len, a.y), slope_class: 1 }
            } else {
                Shape::Segment { a, b: Point::new(a.x, a.y + len), slope_class: 2 }
            }
        })
        .collect()
}
