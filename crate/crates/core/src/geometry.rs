//! Geometric primitives and predicates shared by all algorithms.
//!
//! Exactness policy: every predicate evaluates in double precision with a
//! fixed tolerance [`PredicateConfig::epsilon`]. All shapes are closed point
//! sets, so tangency counts as intersection. Angles are measured
//! counterclockwise from the positive x-axis and normalized into `[0, 2π)`.

use std::f64::consts::TAU;

use crate::error::{GeoError, Result};

/// A point (or vector) in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    /// Horizontal coordinate.
    pub x: f64,
    /// Vertical coordinate.
    pub y: f64,
}

impl Point {
    /// Creates a point from its coordinates.
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Componentwise sum.
    #[inline]
    pub fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    /// Componentwise difference `self - o`.
    #[inline]
    pub fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    /// Scalar multiple.
    #[inline]
    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    /// Dot product.
    #[inline]
    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// Two-dimensional cross product `self.x * o.y - self.y * o.x`.
    #[inline]
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    /// Euclidean norm.
    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Euclidean distance.
    #[inline]
    pub fn dist(self, o: Point) -> f64 {
        self.sub(o).norm()
    }

    /// Chebyshev (L∞) distance.
    #[inline]
    pub fn dist_inf(self, o: Point) -> f64 {
        (self.x - o.x).abs().max((self.y - o.y).abs())
    }

    /// Unit vector at angle `theta`.
    #[inline]
    pub fn from_angle(theta: f64) -> Point {
        Point::new(theta.cos(), theta.sin())
    }

    /// Counterclockwise angle of the vector, normalized into `[0, 2π)`.
    #[inline]
    pub fn angle(self) -> f64 {
        normalize_angle(self.y.atan2(self.x))
    }

    /// Midpoint of `self` and `o`.
    #[inline]
    pub fn midpoint(self, o: Point) -> Point {
        Point::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    /// True when both coordinates are finite.
    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Normalizes an angle into `[0, 2π)`.
#[inline]
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Tolerance configuration shared by the oracle and all algorithms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PredicateConfig {
    /// Absolute tolerance used by every predicate; must be positive.
    pub epsilon: f64,
    /// Seed of the optional ingestion perturbation (see [`perturb_points`]).
    pub perturbation_seed: u64,
}

impl Default for PredicateConfig {
    fn default() -> Self {
        PredicateConfig {
            epsilon: 1e-9,
            perturbation_seed: 0,
        }
    }
}

impl PredicateConfig {
    /// Creates a configuration, rejecting a non-positive epsilon.
    pub fn new(epsilon: f64, perturbation_seed: u64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(GeoError::Parameter(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(PredicateConfig {
            epsilon,
            perturbation_seed,
        })
    }
}

/// Registered slope classes for segments. Class `k` (1-based) is the
/// direction `directions[k - 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeTable {
    directions: Vec<Point>,
}

impl Default for SlopeTable {
    /// Horizontal, vertical and the main diagonal.
    fn default() -> Self {
        SlopeTable {
            directions: vec![Point::new(1.0, 0.0), Point::new(0.0, 1.0), Point::new(1.0, 1.0)],
        }
    }
}

impl SlopeTable {
    /// Builds a table from direction vectors; directions must be nonzero and
    /// pairwise non-parallel.
    pub fn new(directions: Vec<Point>) -> Result<Self> {
        if directions.is_empty() {
            return Err(GeoError::Parameter("slope table is empty".into()));
        }
        for (i, d) in directions.iter().enumerate() {
            if !d.is_finite() || d.norm() == 0.0 {
                return Err(GeoError::Parameter(format!("slope {} is degenerate", i + 1)));
            }
            for e in &directions[..i] {
                if d.cross(*e).abs() <= 1e-12 * d.norm() * e.norm() {
                    return Err(GeoError::Parameter(format!(
                        "slope {} is parallel to an earlier slope",
                        i + 1
                    )));
                }
            }
        }
        Ok(SlopeTable { directions })
    }

    /// The first `h` slopes of the default table.
    pub fn first(h: usize) -> Result<Self> {
        let all = SlopeTable::default().directions;
        if h == 0 || h > all.len() {
            return Err(GeoError::Parameter(format!("h must be in 1..={}", all.len())));
        }
        Ok(SlopeTable {
            directions: all[..h].to_vec(),
        })
    }

    /// Number of registered slopes `h`.
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    /// True when no slope is registered (never the case for a valid table).
    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Direction vector of a 1-based slope class.
    pub fn direction(&self, class: u32) -> Option<Point> {
        let k = class as usize;
        if k == 0 || k > self.directions.len() {
            None
        } else {
            Some(self.directions[k - 1])
        }
    }

    /// All directions in class order.
    pub fn directions(&self) -> &[Point] {
        &self.directions
    }

    /// The slope class whose direction is parallel to `b - a`, if any.
    pub fn classify(&self, a: Point, b: Point) -> Option<u32> {
        let v = b.sub(a);
        let len = v.norm();
        if len == 0.0 {
            return None;
        }
        self.directions
            .iter()
            .position(|d| v.cross(*d).abs() <= 1e-9 * len * d.norm())
            .map(|i| i as u32 + 1)
    }
}

/// A geometric object; one vertex of an intersection graph.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    /// Closed disk of radius 1.
    UnitDisk {
        /// Disk center.
        center: Point,
    },
    /// Closed axis-aligned square of side 1.
    UnitSquare {
        /// Square center.
        center: Point,
    },
    /// Closed segment whose direction is a registered slope class.
    Segment {
        /// First endpoint.
        a: Point,
        /// Second endpoint.
        b: Point,
        /// 1-based index into the slope table.
        slope_class: u32,
    },
    /// Closed triangle (boundary and interior).
    Triangle {
        /// First vertex.
        a: Point,
        /// Second vertex.
        b: Point,
        /// Third vertex.
        c: Point,
    },
    /// Polygonal chain (a string made of segments).
    Polyline {
        /// Chain vertices in order; at least two.
        vertices: Vec<Point>,
    },
}

impl Shape {
    /// Short name of the shape kind.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Shape::UnitDisk { .. } => "unit_disk",
            Shape::UnitSquare { .. } => "unit_square",
            Shape::Segment { .. } => "segment",
            Shape::Triangle { .. } => "triangle",
            Shape::Polyline { .. } => "polyline",
        }
    }

    /// Creates a segment, classifying its slope against `table`.
    pub fn segment(a: Point, b: Point, table: &SlopeTable) -> Result<Shape> {
        let slope_class = table.classify(a, b).ok_or_else(|| GeoError::InvalidShape {
            index: 0,
            reason: "segment direction is not a registered slope".into(),
        })?;
        Ok(Shape::Segment { a, b, slope_class })
    }

    /// All defining points of the shape.
    pub fn points(&self) -> Vec<Point> {
        match self {
            Shape::UnitDisk { center } | Shape::UnitSquare { center } => vec![*center],
            Shape::Segment { a, b, .. } => vec![*a, *b],
            Shape::Triangle { a, b, c } => vec![*a, *b, *c],
            Shape::Polyline { vertices } => vertices.clone(),
        }
    }

    /// Checks the type invariants; `table` is required to validate segment
    /// slope classes and is ignored for other kinds.
    ///
    /// Triangles whose vertices are collinear are accepted as long as they
    /// are not a single point; they behave as the segment spanned by their
    /// vertices (the hardness generators emit such triangles when k = 1).
    pub fn validate(&self, index: usize, table: Option<&SlopeTable>) -> Result<()> {
        let bad = |reason: &str| GeoError::InvalidShape {
            index,
            reason: reason.to_string(),
        };
        if !self.points().iter().all(|p| p.is_finite()) {
            return Err(bad("non-finite coordinate"));
        }
        match self {
            Shape::UnitDisk { .. } | Shape::UnitSquare { .. } => Ok(()),
            Shape::Segment { a, b, slope_class } => {
                if a == b {
                    return Err(bad("segment endpoints coincide"));
                }
                if let Some(t) = table {
                    let d = t
                        .direction(*slope_class)
                        .ok_or_else(|| bad("slope class not in slope table"))?;
                    let v = b.sub(*a);
                    if v.cross(d).abs() > 1e-9 * v.norm() * d.norm() {
                        return Err(bad("slope class inconsistent with segment direction"));
                    }
                }
                Ok(())
            }
            Shape::Triangle { a, b, c } => {
                if a == b && b == c {
                    return Err(bad("triangle collapses to a point"));
                }
                Ok(())
            }
            Shape::Polyline { vertices } => {
                if vertices.len() < 2 {
                    return Err(bad("polyline needs at least two vertices"));
                }
                Ok(())
            }
        }
    }

    /// Axis-aligned bounding box `(min, max)` of the closed shape.
    pub fn bbox(&self) -> (Point, Point) {
        match self {
            Shape::UnitDisk { center } => (
                Point::new(center.x - 1.0, center.y - 1.0),
                Point::new(center.x + 1.0, center.y + 1.0),
            ),
            Shape::UnitSquare { center } => (
                Point::new(center.x - 0.5, center.y - 0.5),
                Point::new(center.x + 0.5, center.y + 0.5),
            ),
            _ => {
                let pts = self.points();
                let mut lo = pts[0];
                let mut hi = pts[0];
                for p in &pts[1..] {
                    lo.x = lo.x.min(p.x);
                    lo.y = lo.y.min(p.y);
                    hi.x = hi.x.max(p.x);
                    hi.y = hi.y.max(p.y);
                }
                (lo, hi)
            }
        }
    }
}

/// Signed distance of `c` from the directed line through `a` and `b`
/// (positive on the left).
#[inline]
fn signed_dist(a: Point, b: Point, c: Point) -> f64 {
    let d = b.sub(a);
    let len = d.norm();
    if len == 0.0 {
        c.dist(a)
    } else {
        d.cross(c.sub(a)) / len
    }
}

#[inline]
fn sign_eps(v: f64, eps: f64) -> i8 {
    if v > eps {
        1
    } else if v < -eps {
        -1
    } else {
        0
    }
}

/// True when `p`, assumed (nearly) collinear with segment `ab`, lies on it.
#[inline]
fn on_segment(a: Point, b: Point, p: Point, eps: f64) -> bool {
    let d = b.sub(a);
    let len2 = d.dot(d);
    if len2 == 0.0 {
        return p.dist(a) <= eps;
    }
    let len = len2.sqrt();
    let t = p.sub(a).dot(d) / len;
    t >= -eps && t <= len + eps
}

/// Closed segment–segment intersection test with tolerance `eps`.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point, eps: f64) -> bool {
    if a == b {
        return point_on_segment(a, c, d, eps);
    }
    if c == d {
        return point_on_segment(c, a, b, eps);
    }
    let s1 = sign_eps(signed_dist(a, b, c), eps);
    let s2 = sign_eps(signed_dist(a, b, d), eps);
    let s3 = sign_eps(signed_dist(c, d, a), eps);
    let s4 = sign_eps(signed_dist(c, d, b), eps);
    if s1 * s2 < 0 && s3 * s4 < 0 {
        return true;
    }
    (s1 == 0 && on_segment(a, b, c, eps))
        || (s2 == 0 && on_segment(a, b, d, eps))
        || (s3 == 0 && on_segment(c, d, a, eps))
        || (s4 == 0 && on_segment(c, d, b, eps))
}

/// True when point `p` lies on the closed segment `ab` within `eps`.
pub fn point_on_segment(p: Point, a: Point, b: Point, eps: f64) -> bool {
    if a == b {
        return p.dist(a) <= eps;
    }
    signed_dist(a, b, p).abs() <= eps && on_segment(a, b, p, eps)
}

/// A triangle seen as a closed region; collinear triangles degrade to the
/// segment spanned by their extreme vertices.
enum Region {
    Tri([Point; 3]),
    Seg(Point, Point),
}

fn region_of_triangle(a: Point, b: Point, c: Point, eps: f64) -> Region {
    let longest = [(a, b), (b, c), (c, a)]
        .into_iter()
        .max_by(|x, y| x.0.dist(x.1).total_cmp(&y.0.dist(y.1)))
        .expect("three edges");
    let (p, q) = longest;
    let third = if (p == a && q == b) || (p == b && q == a) {
        c
    } else if (p == b && q == c) || (p == c && q == b) {
        a
    } else {
        b
    };
    if signed_dist(p, q, third).abs() <= eps {
        Region::Seg(p, q)
    } else {
        Region::Tri([a, b, c])
    }
}

fn point_in_triangle(p: Point, t: &[Point; 3], eps: f64) -> bool {
    let orient = t[1].sub(t[0]).cross(t[2].sub(t[0]));
    let s = if orient > 0.0 { 1.0 } else { -1.0 };
    (0..3).all(|i| s * signed_dist(t[i], t[(i + 1) % 3], p) >= -eps)
}

fn region_edges(r: &Region) -> Vec<(Point, Point)> {
    match r {
        Region::Tri(t) => vec![(t[0], t[1]), (t[1], t[2]), (t[2], t[0])],
        Region::Seg(p, q) => vec![(*p, *q)],
    }
}

fn region_contains(r: &Region, p: Point, eps: f64) -> bool {
    match r {
        Region::Tri(t) => point_in_triangle(p, t, eps),
        Region::Seg(a, b) => point_on_segment(p, *a, *b, eps),
    }
}

fn region_vertices(r: &Region) -> Vec<Point> {
    match r {
        Region::Tri(t) => t.to_vec(),
        Region::Seg(p, q) => vec![*p, *q],
    }
}

/// A linear shape decomposed into edges plus, for triangles, a filled region.
fn linear_parts(s: &Shape, eps: f64) -> Option<(Vec<(Point, Point)>, Option<Region>)> {
    match s {
        Shape::Segment { a, b, .. } => Some((vec![(*a, *b)], None)),
        Shape::Polyline { vertices } => Some((
            vertices.windows(2).map(|w| (w[0], w[1])).collect(),
            None,
        )),
        Shape::Triangle { a, b, c } => {
            let r = region_of_triangle(*a, *b, *c, eps);
            Some((region_edges(&r), Some(r)))
        }
        _ => None,
    }
}

/// Decides whether two closed shapes intersect.
///
/// Unit disks intersect iff their center distance is at most `2 + ε`; unit
/// squares iff the L∞ distance of their centers is at most `1 + ε`; segments,
/// polylines and triangles intersect as closed point sets. Mixing disks or
/// squares with any other kind is an explicit error.
pub fn intersects(a: &Shape, b: &Shape, cfg: &PredicateConfig) -> Result<bool> {
    let eps = cfg.epsilon;
    match (a, b) {
        (Shape::UnitDisk { center: c1 }, Shape::UnitDisk { center: c2 }) => {
            Ok(c1.dist(*c2) <= 2.0 + eps)
        }
        (Shape::UnitSquare { center: c1 }, Shape::UnitSquare { center: c2 }) => {
            Ok(c1.dist_inf(*c2) <= 1.0 + eps)
        }
        _ => {
            let (ea, ra) = linear_parts(a, eps)
                .ok_or(GeoError::UnsupportedPair(a.kind_name(), b.kind_name()))?;
            let (eb, rb) = linear_parts(b, eps)
                .ok_or(GeoError::UnsupportedPair(a.kind_name(), b.kind_name()))?;
            let (la, ha) = a.bbox();
            let (lb, hb) = b.bbox();
            if la.x > hb.x + eps || lb.x > ha.x + eps || la.y > hb.y + eps || lb.y > ha.y + eps {
                return Ok(false);
            }
            for &(p, q) in &ea {
                for &(r, s) in &eb {
                    if segments_intersect(p, q, r, s, eps) {
                        return Ok(true);
                    }
                }
            }
            // No boundary crossing: one shape may lie inside a filled triangle.
            if let Some(r) = &ra {
                if b.points().first().is_some_and(|p| region_contains(r, *p, eps)) {
                    return Ok(true);
                }
            }
            if let Some(r) = &rb {
                if a.points().first().is_some_and(|p| region_contains(r, *p, eps)) {
                    return Ok(true);
                }
            }
            if let (Some(r1), Some(r2)) = (&ra, &rb) {
                if region_vertices(r2).iter().any(|p| region_contains(r1, *p, eps))
                    || region_vertices(r1).iter().any(|p| region_contains(r2, *p, eps))
                {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

/// Intersection points of the unit circles centered at `c1` and `c2`,
/// ordered by angle around `c1`. External tangency (within ε) yields a single
/// point.
pub fn circle_circle_intersection(c1: Point, c2: Point, cfg: &PredicateConfig) -> Result<Vec<Point>> {
    let eps = cfg.epsilon;
    let d = c1.dist(c2);
    if d <= eps {
        return Err(GeoError::DegenerateCircles);
    }
    if d > 2.0 + eps {
        return Ok(Vec::new());
    }
    let m = c1.midpoint(c2);
    if (d - 2.0).abs() <= eps {
        return Ok(vec![m]);
    }
    let u = c2.sub(c1).scale(1.0 / d);
    let h = (1.0 - 0.25 * d * d).max(0.0).sqrt();
    let perp = Point::new(-u.y, u.x);
    let mut pts = vec![m.add(perp.scale(h)), m.sub(perp.scale(h))];
    pts.sort_by(|p, q| p.sub(c1).angle().total_cmp(&q.sub(c1).angle()));
    Ok(pts)
}

/// A ray from `origin` in direction `angle`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    /// Start point.
    pub origin: Point,
    /// Direction, counterclockwise from the positive x-axis, in `[0, 2π)`.
    pub angle: f64,
}

impl Ray {
    /// Creates a ray, normalizing the angle.
    pub fn new(origin: Point, angle: f64) -> Self {
        Ray {
            origin,
            angle: normalize_angle(angle),
        }
    }

    /// Point at distance `t` along the ray.
    pub fn at(&self, t: f64) -> Point {
        self.origin.add(Point::from_angle(self.angle).scale(t))
    }
}

/// A counterclockwise angular interval `[start, start + sweep]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngularInterval {
    /// Start angle in `[0, 2π)`.
    pub start: f64,
    /// Counterclockwise extent in `[0, 2π]`; `2π` denotes the full circle.
    pub sweep: f64,
}

impl AngularInterval {
    /// The interval from `start` counterclockwise to `end`.
    pub fn from_to(start: f64, end: f64) -> Self {
        let s = normalize_angle(start);
        let mut sweep = normalize_angle(end - s);
        if sweep == 0.0 && end != start {
            sweep = TAU;
        }
        AngularInterval { start: s, sweep }
    }

    /// The full circle starting at angle 0.
    pub fn full() -> Self {
        AngularInterval {
            start: 0.0,
            sweep: TAU,
        }
    }

    /// Membership test with angular tolerance `eps`.
    pub fn contains(&self, theta: f64, eps: f64) -> bool {
        if self.sweep >= TAU - eps {
            return true;
        }
        let t = normalize_angle(theta - self.start);
        t <= self.sweep + eps || t >= TAU - eps
    }
}

/// A circular arc on the boundary of a unit disk, parameterized by the angle
/// of rays from a declared origin `o` that lies inside the disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    /// Identity of the disk carrying the arc.
    pub disk_index: usize,
    /// Center of that disk.
    pub center: Point,
    /// Origin of the angular frame.
    pub origin: Point,
    /// Angular extent as seen from `origin`.
    pub interval: AngularInterval,
}

/// Distance from `origin` to the boundary of the unit disk at `center` along
/// direction `theta`, assuming `origin` lies in the disk (the farthest
/// intersection otherwise). `None` when the ray misses the circle.
#[inline]
pub fn ray_exit_distance(origin: Point, center: Point, theta: f64) -> Option<f64> {
    let w = center.sub(origin);
    let u = Point::from_angle(theta);
    let b = w.dot(u);
    let disc = 1.0 - w.dot(w) + b * b;
    if disc < 0.0 {
        return None;
    }
    let t = b + disc.sqrt();
    if t < 0.0 {
        None
    } else {
        Some(t)
    }
}

/// Intersection of a ray with an arc, if the ray's angle lies in the arc's
/// angular interval.
pub fn ray_hits_arc(r: &Ray, arc: &Arc, cfg: &PredicateConfig) -> Option<Point> {
    if !arc.interval.contains(r.angle, cfg.epsilon) {
        return None;
    }
    ray_exit_distance(r.origin, arc.center, r.angle).map(|t| r.at(t))
}

/// Deterministic SplitMix64 step used for perturbation offsets.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Applies the deterministic symbolic-perturbation policy: the coordinate
/// `axis` of object `index` moves by `(index + 1) · 2⁻⁴⁰ · h`, where
/// `h ∈ [0.5, 1)` is a hash of `(seed, index, axis)`.
///
/// Only applied when a caller explicitly asks for degeneracy breaking.
pub fn perturb_points(points: &[Point], seed: u64) -> Vec<Point> {
    let unit = (2.0f64).powi(-40);
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let h = |axis: u64| {
                let z = splitmix64(seed ^ splitmix64((i as u64) << 1 | axis));
                0.5 + (z >> 11) as f64 / (1u64 << 54) as f64
            };
            Point::new(
                p.x + (i as f64 + 1.0) * unit * h(0),
                p.y + (i as f64 + 1.0) * unit * h(1),
            )
        })
        .collect()
}
