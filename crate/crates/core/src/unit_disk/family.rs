//! Cell-pair context, canonical disk families and flower ray shooting.

use std::f64::consts::{PI, TAU};
use std::sync::atomic::{AtomicU64, Ordering};

use super::envelope::{merge_max, Circles, Envelope};
use crate::error::{GeoError, Result};
use crate::geometry::{Point, Ray};

/// Absolute slack used when comparing distances against the disk radius.
pub(crate) const DIST_SLACK: f64 = 1e-12;

static NEXT_FAMILY_ID: AtomicU64 = AtomicU64::new(1);

/// Distance from `p` to the closed axis-aligned square `[lo, lo + side]²`.
pub fn dist_to_square(p: Point, lo: Point, side: f64) -> f64 {
    let dx = (lo.x - p.x).max(p.x - (lo.x + side)).max(0.0);
    let dy = (lo.y - p.y).max(p.y - (lo.y + side)).max(0.0);
    dx.hypot(dy)
}

/// Distance between two closed axis-aligned squares of equal side.
pub fn square_distance(a: Point, b: Point, side: f64) -> f64 {
    let dx = ((a.x - b.x).abs() - side).max(0.0);
    let dy = ((a.y - b.y).abs() - side).max(0.0);
    dx.hypot(dy)
}

/// An angular interval `[lo, lo + width]` around an apex.
///
/// Angles inside the cone are addressed by the local parameter
/// `t = θ − lo ∈ [0, width]`, which increases counterclockwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeRange {
    /// Apex of the cone.
    pub apex: Point,
    /// Absolute angle of the clockwise boundary ray.
    pub lo: f64,
    /// Angular width, in `[0, 2π]`.
    pub width: f64,
}

impl ConeRange {
    /// The full turn around `apex`.
    pub fn full(apex: Point) -> Self {
        ConeRange {
            apex,
            lo: 0.0,
            width: TAU,
        }
    }

    /// The minimum closed cone with apex `apex` enclosing the square
    /// `[lo, lo + side]²`. The apex must lie outside the square.
    pub fn enclosing_square(apex: Point, lo: Point, side: f64) -> Result<Self> {
        if dist_to_square(apex, lo, side) <= 0.0 {
            return Err(GeoError::Parameter("cone apex lies inside the enclosed square".into()));
        }
        let center = Point::new(lo.x + side / 2.0, lo.y + side / 2.0);
        let phi = center.sub(apex).angle();
        let corners = [
            lo,
            Point::new(lo.x + side, lo.y),
            Point::new(lo.x, lo.y + side),
            Point::new(lo.x + side, lo.y + side),
        ];
        let (mut dmin, mut dmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for c in corners {
            let mut d = (c.sub(apex).angle() - phi).rem_euclid(TAU);
            if d > PI {
                d -= TAU;
            }
            dmin = dmin.min(d);
            dmax = dmax.max(d);
        }
        Ok(ConeRange {
            apex,
            lo: (phi + dmin).rem_euclid(TAU),
            width: dmax - dmin,
        })
    }

    /// Local parameter of the absolute angle `theta`. Angles slightly
    /// clockwise of the cone map to small negative values.
    pub fn local(&self, theta: f64) -> f64 {
        let t = (theta - self.lo).rem_euclid(TAU);
        if t > self.width && t > PI + self.width / 2.0 {
            t - TAU
        } else {
            t
        }
    }

    /// Local parameter of the direction from the apex to `p`, clamped into
    /// `[0, width]`.
    pub fn local_of_point(&self, p: Point) -> f64 {
        self.local(p.sub(self.apex).angle()).clamp(0.0, self.width)
    }

    /// Absolute angle of local parameter `t`.
    pub fn angle(&self, t: f64) -> f64 {
        self.lo + t
    }

    /// True when `theta` lies in the cone up to `tol` radians.
    pub fn contains(&self, theta: f64, tol: f64) -> bool {
        let t = self.local(theta);
        t >= -tol && t <= self.width + tol
    }
}

/// Geometry shared by every structure built for one pair of grid cells.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellPairContext {
    /// Lower-left corner of the source cell `A`.
    pub cell_a: Point,
    /// Lower-left corner of the target cell `B`.
    pub cell_b: Point,
    /// Grid side.
    pub delta: f64,
    /// Disk radius (1 up to the adjacency tolerance).
    pub rho: f64,
    /// Common point of all relevant disks, on the segment between the cell
    /// centers at distance 1/3 from the center of `A`.
    pub origin: Point,
    /// Minimum cone with apex `origin` enclosing `B`.
    pub cone: ConeRange,
}

/// Largest grid side for which the relevant disks of a cell pair are
/// guaranteed to share the origin point.
pub fn max_grid_side() -> f64 {
    // Positive root of δ²/2 + √2·δ = 1/9.
    let s2 = std::f64::consts::SQRT_2;
    -s2 + (2.0 + 2.0 / 9.0f64).sqrt()
}

impl CellPairContext {
    /// Builds and validates the context of cells with lower-left corners
    /// `cell_a`, `cell_b` and side `delta`, for disks of radius `rho`.
    pub fn new(cell_a: Point, cell_b: Point, delta: f64, rho: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= max_grid_side()) {
            return Err(GeoError::Parameter(format!(
                "grid side {delta} outside (0, {:.4}]",
                max_grid_side()
            )));
        }
        if !(rho >= 1.0 && rho < 1.01) {
            return Err(GeoError::Parameter(format!("disk radius {rho} outside [1, 1.01)")));
        }
        let d = square_distance(cell_a, cell_b, delta);
        let lower = 1.0 - 2.0 * std::f64::consts::SQRT_2 * delta;
        if d < lower - 1e-12 || d > 2.0 * rho + 1e-12 {
            return Err(GeoError::Parameter(format!(
                "cell distance {d} outside [{lower}, {}]",
                2.0 * rho
            )));
        }
        let half = Point::new(delta / 2.0, delta / 2.0);
        let (ca, cb) = (cell_a.add(half), cell_b.add(half));
        let dir = cb.sub(ca);
        let origin = ca.add(dir.scale(1.0 / (3.0 * dir.norm())));
        let cone = ConeRange::enclosing_square(origin, cell_b, delta)?;
        Ok(CellPairContext {
            cell_a,
            cell_b,
            delta,
            rho,
            origin,
            cone,
        })
    }

    /// True when `p` lies in cell `A` (closed, up to rounding).
    pub fn in_cell_a(&self, p: Point) -> bool {
        dist_to_square(p, self.cell_a, self.delta) <= 1e-9
    }

    /// True when `q` lies in cell `B` (closed, up to rounding).
    pub fn in_cell_b(&self, q: Point) -> bool {
        dist_to_square(q, self.cell_b, self.delta) <= 1e-9
    }

    /// True when a disk centered at `c` can be adjacent to points of both
    /// cells, i.e. it is relevant to the pair.
    pub fn is_relevant(&self, c: Point) -> bool {
        dist_to_square(c, self.cell_a, self.delta) <= self.rho
            && dist_to_square(c, self.cell_b, self.delta) <= self.rho
    }
}

/// Node of the spatial tree over disk centers.
#[derive(Clone, Debug)]
struct KdNode {
    lo: Point,
    hi: Point,
    start: u32,
    end: u32,
    children: Option<(u32, u32)>,
}

/// A vertex of some canonical boundary, in cone-local angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaEntry {
    /// Cone-local angle of the vertex.
    pub t: f64,
    /// Canonical subset whose boundary has the vertex.
    pub subset: u32,
    /// Index of the boundary piece starting at the vertex.
    pub piece: u32,
}

/// The disks containing one query point, as a list of canonical subsets.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowerRef {
    /// The query point.
    pub point: Point,
    /// Indices of the canonical subsets whose union is the flower's disks.
    pub subset_indices: Vec<u32>,
}

/// Result of a flower ray shoot.
#[derive(Clone, Debug, PartialEq)]
pub struct RayHit {
    /// The boundary point hit by the ray.
    pub point: Point,
    /// Distance from the ray origin.
    pub distance: f64,
    /// Disks (family indices) whose boundary arcs pass through the point.
    pub disks: Vec<u32>,
}

/// Canonical decomposition of a disk set around a common origin.
///
/// Subsets are the nodes of a median-split 2-d tree over the disk centers;
/// every node stores the polar boundary of the union of its disks as seen
/// from the origin, and the family keeps the angle-sorted array of all
/// boundary vertices falling in the cone.
#[derive(Clone, Debug)]
pub struct CanonicalFamily {
    id: u64,
    origin: Point,
    rho: f64,
    cone: ConeRange,
    centers: Vec<Point>,
    input_index: Vec<usize>,
    nodes: Vec<KdNode>,
    items: Vec<u32>,
    boundaries: Vec<Envelope>,
    lambda: Vec<LambdaEntry>,
    vertex_total: usize,
}

impl CanonicalFamily {
    /// Builds the family for the given disk centers around `origin`,
    /// collecting vertices inside `cone`. Duplicate centers are merged.
    ///
    /// Fails with [`GeoError::StabbingViolated`] when a disk does not
    /// contain the origin.
    pub fn new(disk_centers: &[Point], origin: Point, rho: f64, cone: ConeRange) -> Result<Self> {
        let mut order: Vec<usize> = (0..disk_centers.len()).collect();
        order.sort_by(|&a, &b| {
            let (p, q) = (disk_centers[a], disk_centers[b]);
            p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)).then(a.cmp(&b))
        });
        let mut centers = Vec::new();
        let mut input_index = Vec::new();
        for &i in &order {
            let c = disk_centers[i];
            if !c.is_finite() {
                return Err(GeoError::Parameter(format!("disk {i} has a non-finite center")));
            }
            if c.dist(origin) > rho + DIST_SLACK {
                return Err(GeoError::StabbingViolated { disk: i });
            }
            if centers.last() != Some(&c) {
                centers.push(c);
                input_index.push(i);
            }
        }
        let mut fam = CanonicalFamily {
            id: NEXT_FAMILY_ID.fetch_add(1, Ordering::Relaxed),
            origin,
            rho,
            cone,
            items: (0..centers.len() as u32).collect(),
            centers,
            input_index,
            nodes: Vec::new(),
            boundaries: Vec::new(),
            lambda: Vec::new(),
            vertex_total: 0,
        };
        if !fam.centers.is_empty() {
            fam.build_node(0, fam.centers.len());
        }
        fam.collect_lambda();
        Ok(fam)
    }

    fn build_node(&mut self, start: usize, end: usize) -> u32 {
        let id = self.nodes.len() as u32;
        let pts: Vec<Point> = self.items[start..end].iter().map(|&i| self.centers[i as usize]).collect();
        let lo = pts.iter().fold(Point::new(f64::INFINITY, f64::INFINITY), |a, p| Point::new(a.x.min(p.x), a.y.min(p.y)));
        let hi = pts.iter().fold(Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY), |a, p| Point::new(a.x.max(p.x), a.y.max(p.y)));
        self.nodes.push(KdNode {
            lo,
            hi,
            start: start as u32,
            end: end as u32,
            children: None,
        });
        self.boundaries.push(Envelope::single(self.items[start], 0.0, 0.0, TAU));
        if end - start > 1 {
            let by_x = (hi.x - lo.x) >= (hi.y - lo.y);
            let centers = &self.centers;
            self.items[start..end].sort_by(|&a, &b| {
                let (p, q) = (centers[a as usize], centers[b as usize]);
                if by_x {
                    p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y))
                } else {
                    p.y.total_cmp(&q.y).then(p.x.total_cmp(&q.x))
                }
            });
            let mid = (start + end) / 2;
            let l = self.build_node(start, mid);
            let r = self.build_node(mid, end);
            self.nodes[id as usize].children = Some((l, r));
            let circles = Circles {
                centers: &self.centers,
                origin: self.origin,
                rho: self.rho,
            };
            let merged = merge_max(&self.boundaries[l as usize], &self.boundaries[r as usize], &circles);
            self.boundaries[id as usize] = merged;
        }
        id
    }

    fn collect_lambda(&mut self) {
        let mut lambda = Vec::new();
        let mut total = 0;
        for (i, env) in self.boundaries.iter().enumerate() {
            let verts = env.vertices();
            total += verts.len();
            for s in verts {
                let t = self.cone.local(s);
                if t >= 0.0 && t <= self.cone.width {
                    let piece = env.locate(s) as u32;
                    lambda.push(LambdaEntry {
                        t,
                        subset: i as u32,
                        piece,
                    });
                }
            }
        }
        lambda.sort_by(|a, b| a.t.total_cmp(&b.t));
        self.lambda = lambda;
        self.vertex_total = total;
    }

    /// Identifier distinguishing structures built for different contexts.
    pub fn id(&self) -> u64 {
        self.id
    }

    /// The common origin.
    pub fn origin(&self) -> Point {
        self.origin
    }

    /// The disk radius.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// The cone the vertex array is restricted to.
    pub fn cone(&self) -> ConeRange {
        self.cone
    }

    /// Distinct disk centers, indexed by family disk id.
    pub fn disks(&self) -> &[Point] {
        &self.centers
    }

    /// Input position of each family disk (first occurrence for duplicates).
    pub fn input_index(&self, disk: u32) -> usize {
        self.input_index[disk as usize]
    }

    /// Number of canonical subsets.
    pub fn subset_count(&self) -> usize {
        self.nodes.len()
    }

    /// Disk ids of canonical subset `i`.
    pub fn subset(&self, i: u32) -> &[u32] {
        let n = &self.nodes[i as usize];
        &self.items[n.start as usize..n.end as usize]
    }

    /// Polar boundary of the union of canonical subset `i`, over `[0, 2π]`.
    pub fn boundary(&self, i: u32) -> &Envelope {
        &self.boundaries[i as usize]
    }

    /// Angle-sorted vertices of all canonical boundaries inside the cone.
    pub fn lambda(&self) -> &[LambdaEntry] {
        &self.lambda
    }

    /// Total number of boundary vertices over all canonical subsets.
    pub fn vertex_total(&self) -> usize {
        self.vertex_total
    }

    pub(crate) fn circles(&self) -> Circles<'_> {
        Circles {
            centers: &self.centers,
            origin: self.origin,
            rho: self.rho,
        }
    }

    /// The canonical subsets whose union is exactly the set of disks
    /// containing `p` (closed disks).
    pub fn flower(&self, p: Point) -> FlowerRef {
        let mut out = Vec::new();
        if !self.nodes.is_empty() {
            self.query(0, p, &mut out);
        }
        FlowerRef {
            point: p,
            subset_indices: out,
        }
    }

    fn query(&self, id: u32, p: Point, out: &mut Vec<u32>) {
        let n = &self.nodes[id as usize];
        let far = Point::new((p.x - n.lo.x).abs().max((n.hi.x - p.x).abs()), (p.y - n.lo.y).abs().max((n.hi.y - p.y).abs()));
        let near = Point::new(
            (n.lo.x - p.x).max(p.x - n.hi.x).max(0.0),
            (n.lo.y - p.y).max(p.y - n.hi.y).max(0.0),
        );
        if near.norm() > self.rho + DIST_SLACK {
            return;
        }
        match n.children {
            None => {
                if self.centers[self.items[n.start as usize] as usize].dist(p) <= self.rho {
                    out.push(id);
                }
            }
            Some(_) if far.norm() < self.rho - DIST_SLACK => out.push(id),
            Some((l, r)) => {
                self.query(l, p, out);
                self.query(r, p, out);
            }
        }
    }

    /// All disk ids of a flower, sorted.
    pub fn flower_disks(&self, fp: &FlowerRef) -> Vec<u32> {
        let mut v: Vec<u32> = fp.subset_indices.iter().flat_map(|&i| self.subset(i).iter().copied()).collect();
        v.sort_unstable();
        v
    }

    /// Radial function of the flower at absolute angle `theta`: the distance
    /// from the origin to the flower boundary and one disk attaining it.
    /// `None` for an empty flower.
    pub fn radial(&self, fp: &FlowerRef, theta: f64) -> Option<(f64, u32)> {
        let circles = self.circles();
        let s = theta.rem_euclid(TAU);
        fp.subset_indices
            .iter()
            .map(|&i| self.boundaries[i as usize].eval(s, &circles))
            .max_by(|a, b| a.0.total_cmp(&b.0))
    }

    /// Intersection of the ray from the origin in direction `theta` with
    /// the boundary of the flower, with the disks whose arcs pass through it.
    pub fn ray_shoot(&self, fp: &FlowerRef, theta: f64) -> Result<RayHit> {
        if fp.subset_indices.is_empty() {
            return Err(GeoError::EmptyFlower);
        }
        let circles = self.circles();
        let s = theta.rem_euclid(TAU);
        let mut best = f64::NEG_INFINITY;
        let mut hits: Vec<(f64, u32)> = Vec::new();
        for &i in &fp.subset_indices {
            let env = &self.boundaries[i as usize];
            let k = env.locate(s);
            let mut push = |d: u32| hits.push((circles.radial(d, s), d));
            push(env.disks[k]);
            // Vertices at the query angle contribute both incident arcs.
            if env.breaks[k] == s && k > 0 {
                push(env.disks[k - 1]);
            }
            if env.breaks[k + 1] == s && k + 1 < env.disks.len() {
                push(env.disks[k + 1]);
            }
        }
        for &(r, _) in &hits {
            best = best.max(r);
        }
        let mut disks: Vec<u32> = hits
            .iter()
            .filter(|(r, _)| best - r <= 1e-12)
            .map(|&(_, d)| d)
            .collect();
        disks.sort_unstable();
        disks.dedup();
        Ok(RayHit {
            point: self.origin.add(Point::from_angle(s).scale(best)),
            distance: best,
            disks,
        })
    }
}

/// Builds the canonical family of `disk_centers` for a cell pair.
pub fn build_canonical_family(disk_centers: &[Point], ctx: &CellPairContext) -> Result<CanonicalFamily> {
    CanonicalFamily::new(disk_centers, ctx.origin, ctx.rho, ctx.cone)
}

/// Shoots `ray` (which must start at the family origin) against the
/// boundary of the flower `fp`.
///
/// Requires the flower point within distance 1/2 of the origin, where the
/// ray meets the boundary exactly once.
pub fn flower_ray_shoot(family: &CanonicalFamily, fp: &FlowerRef, ray: &Ray) -> Result<RayHit> {
    if ray.origin.dist(family.origin) > 1e-12 {
        return Err(GeoError::Parameter("ray must start at the family origin".into()));
    }
    if fp.point.dist(family.origin) >= 0.5 {
        return Err(GeoError::Parameter(
            "flower point must lie within distance 1/2 of the origin".into(),
        ));
    }
    family.ray_shoot(fp, ray.angle)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o() -> Point {
        Point::new(0.0, 0.0)
    }

    #[test]
    fn single_disk_ray_shoot() {
        let fam = CanonicalFamily::new(&[Point::new(0.1, 0.0)], o(), 1.0, ConeRange::full(o())).unwrap();
        let fp = fam.flower(Point::new(0.1, 0.0));
        let hit = flower_ray_shoot(&fam, &fp, &Ray::new(o(), 0.0)).unwrap();
        assert!(hit.point.dist(Point::new(1.1, 0.0)) < 1e-12);
        assert_eq!(hit.disks, vec![0]);
    }

    #[test]
    fn farther_boundary_wins() {
        let fam = CanonicalFamily::new(&[Point::new(0.1, 0.0), Point::new(0.5, 0.0)], o(), 1.0, ConeRange::full(o()))
            .unwrap();
        let fp = fam.flower(Point::new(0.3, 0.0));
        assert_eq!(fam.flower_disks(&fp).len(), 2);
        let hit = flower_ray_shoot(&fam, &fp, &Ray::new(o(), 0.0)).unwrap();
        assert!(hit.point.dist(Point::new(1.5, 0.0)) < 1e-12);
    }

    #[test]
    fn one_disk_is_one_full_circle_subset() {
        let fam = CanonicalFamily::new(&[Point::new(0.2, 0.1)], o(), 1.0, ConeRange::full(o())).unwrap();
        assert_eq!(fam.subset_count(), 1);
        let b = fam.boundary(0);
        assert_eq!(b.disks, vec![0]);
        assert_eq!(b.domain(), (0.0, TAU));
        assert!(fam.lambda().is_empty());
    }

    #[test]
    fn point_outside_all_disks_has_empty_flower() {
        let fam = CanonicalFamily::new(&[Point::new(0.2, 0.1)], o(), 1.0, ConeRange::full(o())).unwrap();
        let fp = fam.flower(Point::new(3.0, 0.0));
        assert!(fp.subset_indices.is_empty());
        assert_eq!(
            flower_ray_shoot(&fam, &FlowerRef { point: o(), subset_indices: vec![] }, &Ray::new(o(), 0.0)),
            Err(GeoError::EmptyFlower)
        );
    }

    #[test]
    fn stabbing_is_validated() {
        let err = CanonicalFamily::new(&[Point::new(0.0, 0.0), Point::new(2.0, 0.0)], o(), 1.0, ConeRange::full(o()));
        assert_eq!(err.unwrap_err(), GeoError::StabbingViolated { disk: 1 });
    }

    #[test]
    fn far_flower_point_is_rejected() {
        let fam = CanonicalFamily::new(&[Point::new(0.2, 0.1)], o(), 1.0, ConeRange::full(o())).unwrap();
        let fp = fam.flower(Point::new(0.6, 0.0));
        assert!(matches!(flower_ray_shoot(&fam, &fp, &Ray::new(o(), 0.0)), Err(GeoError::Parameter(_))));
    }

    #[test]
    fn cone_of_square_encloses_corners() {
        let c = ConeRange::enclosing_square(o(), Point::new(1.0, -0.5), 1.0).unwrap();
        assert!((c.width - 2.0 * (0.5f64).atan()).abs() < 1e-12);
        assert!(c.contains(0.0, 0.0));
        assert!(!c.contains(PI, 0.0));
        let wrap = ConeRange::enclosing_square(o(), Point::new(1.0, -0.1), 0.2).unwrap();
        assert!(wrap.local(TAU - 0.05) > 0.0 && wrap.local(0.05) < wrap.width);
    }

    #[test]
    fn grid_side_bound() {
        let d = max_grid_side();
        assert!((d * d / 2.0 + std::f64::consts::SQRT_2 * d - 1.0 / 9.0).abs() < 1e-12);
        assert!(d > 1.0 / 20.0);
    }

    #[test]
    fn context_validates_distance() {
        let d = 0.05;
        assert!(CellPairContext::new(o(), Point::new(0.1, 0.0), d, 1.0).is_err());
        assert!(CellPairContext::new(o(), Point::new(3.0, 0.0), d, 1.0).is_err());
        let ctx = CellPairContext::new(o(), Point::new(1.5, 0.0), d, 1.0).unwrap();
        assert!((ctx.origin.dist(Point::new(0.025, 0.025)) - 1.0 / 3.0).abs() < 1e-12);
    }
}
