//! Diameter-2 decision for unit-disk graphs.
//!
//! Input points are centers of radius-1 disks; two disks are adjacent when
//! their centers are at distance at most `2 + ε`. Internally coordinates are
//! halved, so adjacency becomes "distance at most `ρ = 1 + ε/2`" and the
//! neighbors of `p` are exactly the centers of the radius-`ρ` disks
//! containing `p`. Then `q` is within two hops of `p` iff `q` lies in the
//! *flower* of `p`, the union of those disks.
//!
//! The plane is cut into a grid of side `δ`. Two cells closer than
//! `1 − 2√2·δ` are fully adjacent; cells farther than `2ρ` apart witness a
//! diameter above 2; every remaining cell pair is checked by intersecting
//! the flowers of one cell inside the cone towards the other
//! ([`check_cell_pair`]), unless a single disk already covers both cells'
//! points.

mod chain;
mod envelope;
mod family;
mod pairwise;
pub mod reference;

use std::collections::HashMap;

pub use chain::{check_cell_pair, check_cell_pair_counted, BoundaryChain, CellPairSolver, ChainEntry};
pub use envelope::{crossing_angles, radial, Circles, Cmp, Envelope};
pub use family::{
    build_canonical_family, dist_to_square, flower_ray_shoot, max_grid_side, square_distance, CanonicalFamily,
    CellPairContext, ConeRange, FlowerRef, LambdaEntry, RayHit,
};
pub use pairwise::{pairwise_boundary_in_cone, PairwiseBoundary, Side};

use crate::error::{GeoError, Result};
use crate::geometry::{Point, PredicateConfig};

/// Side of the coarse buckets used to look up candidate disk centers.
const BUCKET: f64 = 0.25;

/// Options of [`decide_diam2_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitDiskConfig {
    /// Adjacency tolerance.
    pub predicate: PredicateConfig,
    /// Grid side, in units of the disk radius; at most [`max_grid_side`].
    pub delta: f64,
    /// Accept a cell pair immediately when one disk covers all its points.
    pub shortcuts: bool,
}

impl Default for UnitDiskConfig {
    fn default() -> Self {
        UnitDiskConfig {
            predicate: PredicateConfig::default(),
            delta: 1.0 / 20.0,
            shortcuts: true,
        }
    }
}

/// Counters reported by [`decide_diam2_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UnitDiskStats {
    /// Nonempty grid cells.
    pub cells: usize,
    /// Cell pairs examined.
    pub cell_pairs: usize,
    /// Pairs accepted because the cells are close.
    pub near_pairs: usize,
    /// Pairs accepted by a single covering disk.
    pub shortcut_pairs: usize,
    /// Pairs resolved by the flower-intersection pipeline.
    pub pipeline_pairs: usize,
    /// Total relevant disks over all pipeline runs.
    pub pipeline_disks: usize,
    /// Pairwise boundary descriptions computed.
    pub pairwise_calls: usize,
}

/// Decides whether the intersection graph of the unit disks centered at
/// `points` has diameter at most 2, with default options.
pub fn decide_diam2(points: &[Point]) -> Result<bool> {
    decide_diam2_with(points, &UnitDiskConfig::default(), &mut UnitDiskStats::default())
}

struct Cell {
    key: (i64, i64),
    pts: Vec<Point>,
    lo: Point,
    hi: Point,
}

/// [`decide_diam2`] with explicit options and counters.
///
/// Errors: empty input, non-finite coordinates, an invalid grid side, and
/// any internal validation failure of the pipeline (never a silent wrong
/// answer).
pub fn decide_diam2_with(points: &[Point], cfg: &UnitDiskConfig, stats: &mut UnitDiskStats) -> Result<bool> {
    if points.is_empty() {
        return Err(GeoError::Parameter("decide_diam2 needs at least one point".into()));
    }
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(GeoError::InvalidShape {
            index: i,
            reason: "non-finite center".into(),
        });
    }
    let delta = cfg.delta;
    if !(delta > 0.0 && delta <= max_grid_side()) {
        return Err(GeoError::Parameter(format!(
            "grid side {delta} outside (0, {:.4}]",
            max_grid_side()
        )));
    }
    if points.len() == 1 {
        return Ok(true);
    }
    let rho = 1.0 + cfg.predicate.epsilon / 2.0;
    let pts: Vec<Point> = points.iter().map(|p| p.scale(0.5)).collect();
    let (lo, hi) = bbox(&pts);
    if hi.x - lo.x > 2.0 * rho || hi.y - lo.y > 2.0 * rho {
        return Ok(false);
    }

    let mut by_key: HashMap<(i64, i64), Vec<Point>> = HashMap::new();
    for &p in &pts {
        by_key.entry(key_of(p, delta)).or_default().push(p);
    }
    let mut cells: Vec<Cell> = by_key
        .into_iter()
        .map(|(key, pts)| {
            let (lo, hi) = bbox(&pts);
            Cell { key, pts, lo, hi }
        })
        .collect();
    cells.sort_by_key(|c| c.key);
    stats.cells = cells.len();

    let mut buckets: HashMap<(i64, i64), Vec<Point>> = HashMap::new();
    for &p in &pts {
        buckets.entry(key_of(p, BUCKET)).or_default().push(p);
    }
    let near = 1.0 - 2.0 * std::f64::consts::SQRT_2 * delta;
    let corner = |c: &Cell| Point::new(c.key.0 as f64 * delta, c.key.1 as f64 * delta);

    for ia in 0..cells.len() {
        for ib in ia + 1..cells.len() {
            let (a, b) = (&cells[ia], &cells[ib]);
            stats.cell_pairs += 1;
            let (ca, cb) = (corner(a), corner(b));
            let d = square_distance(ca, cb, delta);
            if d <= near {
                stats.near_pairs += 1;
                continue;
            }
            if d > 2.0 * rho + 1e-9 {
                return Ok(false);
            }
            if cfg.shortcuts && single_cover(a, b, rho, &buckets) {
                stats.shortcut_pairs += 1;
                continue;
            }
            let ctx = CellPairContext::new(ca, cb, delta, rho)?;
            let disks = relevant_disks(&ctx, &buckets);
            stats.pipeline_pairs += 1;
            stats.pipeline_disks += disks.len();
            let (ok, calls, _) = check_cell_pair_counted(&ctx, &a.pts, &b.pts, &disks)?;
            stats.pairwise_calls += calls;
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn key_of(p: Point, side: f64) -> (i64, i64) {
    ((p.x / side).floor() as i64, (p.y / side).floor() as i64)
}

fn bbox(pts: &[Point]) -> (Point, Point) {
    pts.iter().fold(
        (
            Point::new(f64::INFINITY, f64::INFINITY),
            Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        ),
        |(l, h), p| (Point::new(l.x.min(p.x), l.y.min(p.y)), Point::new(h.x.max(p.x), h.y.max(p.y))),
    )
}

/// Candidate centers from the buckets meeting the box `[lo, hi]`.
fn bucket_points<'a>(
    buckets: &'a HashMap<(i64, i64), Vec<Point>>,
    lo: Point,
    hi: Point,
) -> impl Iterator<Item = &'a Point> + 'a {
    let (k0, k1) = (key_of(lo, BUCKET), key_of(hi, BUCKET));
    (k0.0..=k1.0)
        .flat_map(move |x| (k0.1..=k1.1).map(move |y| (x, y)))
        .filter_map(move |k| buckets.get(&k))
        .flatten()
}

/// True when some input center is within `rho` of every point of both
/// cells (checked against the corners of their joint bounding box).
fn single_cover(a: &Cell, b: &Cell, rho: f64, buckets: &HashMap<(i64, i64), Vec<Point>>) -> bool {
    let lo = Point::new(a.lo.x.min(b.lo.x), a.lo.y.min(b.lo.y));
    let hi = Point::new(a.hi.x.max(b.hi.x), a.hi.y.max(b.hi.y));
    let diag = hi.dist(lo);
    if diag > 2.0 * rho {
        return false;
    }
    // Any valid center is within ρ of both ends of the diagonal, hence in
    // this disk around the box center.
    let r = (rho * rho - diag * diag / 4.0).max(0.0).sqrt() + 1e-12;
    let m = lo.midpoint(hi);
    let covers = |c: &Point| {
        let fx = (c.x - lo.x).abs().max((hi.x - c.x).abs());
        let fy = (c.y - lo.y).abs().max((hi.y - c.y).abs());
        fx.hypot(fy) <= rho - 1e-12
    };
    // Scan buckets in rings around the box center, nearest first.
    let k = key_of(m, BUCKET);
    let rings = (r / BUCKET).ceil() as i64 + 1;
    for ring in 0..=rings {
        for dx in -ring..=ring {
            for dy in -ring..=ring {
                if dx.abs().max(dy.abs()) != ring {
                    continue;
                }
                if let Some(b) = buckets.get(&(k.0 + dx, k.1 + dy)) {
                    if b.iter().any(covers) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Input centers within `rho` of both cells of the context.
fn relevant_disks(ctx: &CellPairContext, buckets: &HashMap<(i64, i64), Vec<Point>>) -> Vec<Point> {
    let r = ctx.rho;
    let lo = Point::new(ctx.cell_a.x - r, ctx.cell_a.y - r);
    let hi = Point::new(ctx.cell_a.x + ctx.delta + r, ctx.cell_a.y + ctx.delta + r);
    bucket_points(buckets, lo, hi).copied().filter(|&c| ctx.is_relevant(c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(c: &[(f64, f64)]) -> Vec<Point> {
        c.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn path_of_three_has_diameter_two() {
        assert!(decide_diam2(&pts(&[(0.0, 0.0), (1.9, 0.0), (3.8, 0.0)])).unwrap());
    }

    #[test]
    fn path_of_four_has_diameter_three() {
        assert!(!decide_diam2(&pts(&[(0.0, 0.0), (1.9, 0.0), (3.8, 0.0), (5.7, 0.0)])).unwrap());
    }

    #[test]
    fn trivial_inputs() {
        assert!(decide_diam2(&[]).is_err());
        assert!(decide_diam2(&pts(&[(1.0, 1.0)])).unwrap());
        assert!(decide_diam2(&pts(&[(1.0, 1.0), (1.0, 1.0)])).unwrap());
        assert!(!decide_diam2(&pts(&[(0.0, 0.0), (10.0, 0.0)])).unwrap());
        assert!(decide_diam2(&pts(&[(0.0, f64::NAN)])).is_err());
    }

    #[test]
    fn pipeline_without_shortcuts_agrees_on_path() {
        let cfg = UnitDiskConfig {
            shortcuts: false,
            ..UnitDiskConfig::default()
        };
        let mut st = UnitDiskStats::default();
        assert!(decide_diam2_with(&pts(&[(0.0, 0.0), (1.9, 0.0), (3.8, 0.0)]), &cfg, &mut st).unwrap());
        assert!(st.pipeline_pairs > 0);
    }

    #[test]
    fn check_cell_pair_trivial_cases() {
        let d = 0.05;
        let ctx = CellPairContext::new(Point::new(0.0, 0.0), Point::new(1.5, 0.0), d, 1.0).unwrap();
        let p = Point::new(0.01, 0.01);
        let q = Point::new(1.52, 0.02);
        let mid = p.midpoint(q);
        assert!(check_cell_pair(&ctx, &[p], &[q], &[mid]).unwrap());
        assert!(!check_cell_pair(&ctx, &[p], &[q], &[]).unwrap());
        assert!(check_cell_pair(&ctx, &[], &[q], &[]).unwrap());
        assert!(check_cell_pair(&ctx, &[p], &[], &[]).unwrap());
    }
}
