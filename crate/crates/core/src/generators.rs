//! Instances realizing the hardness constructions, each with a known
//! expected answer and a brute-force validation pass.
//!
//! * [`gen_ov_strings`]: one polygonal chain per 0/1 vector; the chains form
//!   a clique iff no A-vector is orthogonal to a B-vector.
//! * [`gen_k4_segments`]: segments whose intersection graph has diameter at
//!   most 2 iff a 4-partite graph has no 4-clique.
//! * [`gen_h6_triangles`]: triangles whose intersection graph has diameter
//!   at most 2 iff a 6-partite 3-uniform hypergraph has no 6-hyperclique.

use rand::Rng;

use crate::error::{GeoError, Result};
use crate::geometry::{intersects, Point, PredicateConfig, Shape, SlopeTable};
use crate::oracle::{build_graph, UNREACHABLE};

/// Question answered by a generated instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Question {
    /// Is the diameter at most the given bound?
    DiameterAtMost(u32),
    /// Is the intersection graph a clique (diameter at most 1)?
    IsClique,
}

impl Question {
    /// The diameter bound the question amounts to.
    pub fn delta(&self) -> u32 {
        match self {
            Question::DiameterAtMost(d) => *d,
            Question::IsClique => 1,
        }
    }
}

/// Expected answer of a generated instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Expected {
    /// The question.
    pub question: Question,
    /// Its answer, derived from the combinatorial input.
    pub answer: bool,
}

/// Summary of the geometric checks a generator ran.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    /// Named checks with the number of shape pairs (or items) verified.
    pub checks: Vec<(String, usize)>,
    /// Spacing parameter τ actually used, when the construction has one.
    pub tau: Option<f64>,
}

/// Shapes with their expected answer and validation summary.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedInstance {
    /// The shapes.
    pub shapes: Vec<Shape>,
    /// Role of each shape, e.g. `t_AB(1,2)`, `h_AD(1,1)` or `dummy`.
    pub labels: Vec<String>,
    /// Slope table covering every segment, when the shapes are segments.
    pub slope_table: Option<SlopeTable>,
    /// The expected answer.
    pub expected: Expected,
    /// The checks performed.
    pub validation: ValidationReport,
}

fn invalid(msg: String) -> GeoError {
    GeoError::ConstructionInvalid(msg)
}

fn lerp(p: Point, q: Point, t: f64) -> Point {
    p.add(q.sub(p).scale(t))
}

/// Point at fraction `(x − 1)/k + y/(τ k²)` of the way along `s`.
fn pair_point(s: (Point, Point), x: usize, y: usize, k: usize, tau: f64) -> Point {
    let k = k as f64;
    lerp(s.0, s.1, (x as f64 - 1.0) / k + y as f64 / (tau * k * k))
}

/// Verifies that every pair not flagged by `exempt` is within distance 2.
fn check_distances(shapes: &[Shape], exempt: impl Fn(usize, usize) -> bool) -> Result<usize> {
    let g = build_graph(shapes, &PredicateConfig::default())?;
    let mut count = 0;
    for u in 0..g.n {
        let dist = g.bfs(u);
        for v in u + 1..g.n {
            if exempt(u, v) {
                continue;
            }
            if dist[v] == UNREACHABLE || dist[v] > 2 {
                return Err(invalid(format!("shapes {u} and {v} are at distance greater than 2")));
            }
            count += 1;
        }
    }
    Ok(count)
}

// ---------------------------------------------------------------------------
// Orthogonal vectors → clique of strings.

/// Two sets of 0/1 vectors of a common dimension `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OvInstance {
    /// Dimension.
    pub d: usize,
    /// First set.
    pub a: Vec<Vec<bool>>,
    /// Second set.
    pub b: Vec<Vec<bool>>,
}

impl OvInstance {
    /// Validates the vector lengths.
    pub fn new(d: usize, a: Vec<Vec<bool>>, b: Vec<Vec<bool>>) -> Result<Self> {
        if a.iter().chain(&b).any(|v| v.len() != d) {
            return Err(GeoError::Parameter(format!("all vectors must have length {d}")));
        }
        Ok(OvInstance { d, a, b })
    }

    /// Uniform random bits.
    pub fn random(d: usize, na: usize, nb: usize, rng: &mut impl Rng) -> Self {
        let mut v = |n: usize| (0..n).map(|_| (0..d).map(|_| rng.gen_bool(0.5)).collect()).collect();
        let a = v(na);
        let b = v(nb);
        OvInstance { d, a, b }
    }

    /// True when some `u ∈ A`, `v ∈ B` have no common one.
    pub fn has_orthogonal_pair(&self) -> bool {
        self.a
            .iter()
            .any(|u| self.b.iter().any(|v| u.iter().zip(v).all(|(x, y)| !(x & y))))
    }
}

/// [`gen_ov_strings_with`] with anchors.
pub fn gen_ov_strings(inst: &OvInstance) -> Result<GeneratedInstance> {
    gen_ov_strings_with(inst, true)
}

/// One polygonal chain per vector: `u ∈ A` visits `(i, u_i − 1)` and
/// `v ∈ B` visits `(i, 1 − v_i)` for `i = 1..d`. Two such chains of
/// opposite sides meet iff the vectors share a one.
///
/// With `anchors`, every A-vector is extended by the coordinates `(1, 0)`
/// and every B-vector by `(0, 1)`: all A-chains then pass through
/// `(d + 1, 0)`, all B-chains through `(d + 2, 0)`, and cross pairs are
/// unaffected, so the chains form a clique exactly when no orthogonal pair
/// exists. Without anchors chains of the same side need not meet and the
/// construction is rejected when they do not.
pub fn gen_ov_strings_with(inst: &OvInstance, anchors: bool) -> Result<GeneratedInstance> {
    if inst.d < 2 {
        return Err(GeoError::Parameter("dimension must be at least 2".into()));
    }
    if inst.a.is_empty() && inst.b.is_empty() {
        return Err(GeoError::Parameter("no vectors".into()));
    }
    if inst.a.iter().chain(&inst.b).any(|v| v.len() != inst.d) {
        return Err(GeoError::Parameter(format!("all vectors must have length {}", inst.d)));
    }
    let chain = |v: &[bool], extra: [bool; 2], side_a: bool| {
        let mut bits = v.to_vec();
        if anchors {
            bits.extend_from_slice(&extra);
        }
        let vertices = bits
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let x = f64::from(u8::from(x));
                Point::new(i as f64 + 1.0, if side_a { x - 1.0 } else { 1.0 - x })
            })
            .collect();
        Shape::Polyline { vertices }
    };
    let mut shapes = Vec::new();
    let mut labels = Vec::new();
    for (i, u) in inst.a.iter().enumerate() {
        shapes.push(chain(u, [true, false], true));
        labels.push(format!("A{}", i + 1));
    }
    for (i, v) in inst.b.iter().enumerate() {
        shapes.push(chain(v, [false, true], false));
        labels.push(format!("B{}", i + 1));
    }
    let cfg = PredicateConfig::default();
    let na = inst.a.len();
    let mut pairs = 0;
    for i in 0..shapes.len() {
        for j in i + 1..shapes.len() {
            let meet = intersects(&shapes[i], &shapes[j], &cfg)?;
            let want = if j < na || i >= na {
                true
            } else {
                let (u, v) = (&inst.a[i], &inst.b[j - na]);
                u.iter().zip(v).any(|(x, y)| x & y)
            };
            if meet != want {
                return Err(invalid(format!(
                    "chains {} and {} {} but should {}",
                    labels[i],
                    labels[j],
                    if meet { "meet" } else { "are disjoint" },
                    if want { "meet" } else { "be disjoint" }
                )));
            }
            pairs += 1;
        }
    }
    Ok(GeneratedInstance {
        shapes,
        labels,
        slope_table: None,
        expected: Expected {
            question: Question::IsClique,
            answer: !inst.has_orthogonal_pair(),
        },
        validation: ValidationReport {
            checks: vec![("chain pairs".into(), pairs)],
            tau: None,
        },
    })
}

// ---------------------------------------------------------------------------
// 4-clique → diameter 2 of segments.

/// The six pair relations of a 4-partite graph with parts A, B, C, D.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum K4Pair {
    /// A–B (left segments).
    AB,
    /// C–D (right segments).
    CD,
    /// A–C (crossing).
    AC,
    /// A–D (crossing).
    AD,
    /// B–C (crossing).
    BC,
    /// B–D (crossing).
    BD,
}

impl K4Pair {
    /// All pairs.
    pub const ALL: [K4Pair; 6] = [K4Pair::AB, K4Pair::CD, K4Pair::AC, K4Pair::AD, K4Pair::BC, K4Pair::BD];

    fn index(self) -> usize {
        self as usize
    }
}

/// A 4-partite graph with `k` vertices per part, numbered `1..=k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourPartiteGraph {
    k: usize,
    edges: [Vec<bool>; 6],
}

impl FourPartiteGraph {
    /// The graph without edges.
    pub fn empty(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(GeoError::Parameter("k must be at least 1".into()));
        }
        Ok(FourPartiteGraph {
            k,
            edges: std::array::from_fn(|_| vec![false; k * k]),
        })
    }

    /// Every edge present independently with probability `p`.
    pub fn random(k: usize, p: f64, rng: &mut impl Rng) -> Result<Self> {
        let mut g = Self::empty(k)?;
        for e in &mut g.edges {
            e.iter_mut().for_each(|b| *b = rng.gen_bool(p));
        }
        Ok(g)
    }

    /// Part size.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Whether `x` and `y` (1-based, in the order of the pair's name) are
    /// adjacent.
    pub fn has(&self, pair: K4Pair, x: usize, y: usize) -> bool {
        self.edges[pair.index()][(x - 1) * self.k + (y - 1)]
    }

    /// Adds or removes an edge.
    pub fn set(&mut self, pair: K4Pair, x: usize, y: usize, present: bool) {
        let k = self.k;
        self.edges[pair.index()][(x - 1) * k + (y - 1)] = present;
    }

    /// True when some `(a, b, c, d)` is pairwise adjacent.
    pub fn has_4clique(&self) -> bool {
        let k = self.k;
        let r = 1..=k;
        r.clone().any(|a| {
            r.clone().any(|b| {
                self.has(K4Pair::AB, a, b)
                    && r.clone().any(|c| {
                        self.has(K4Pair::AC, a, c)
                            && self.has(K4Pair::BC, b, c)
                            && r.clone().any(|d| {
                                self.has(K4Pair::CD, c, d) && self.has(K4Pair::AD, a, d) && self.has(K4Pair::BD, b, d)
                            })
                    })
            })
        })
    }
}

/// Geometry of the segment construction for one `(k, τ)`.
struct K4Frame {
    k: usize,
    tau: f64,
    s_ab: (Point, Point),
    s_ba: (Point, Point),
    s_cd: (Point, Point),
    s_dc: (Point, Point),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Part {
    A,
    B,
    C,
    D,
}

impl K4Frame {
    fn new(k: usize, tau: f64) -> Self {
        let v = [Point::new(-3.0, 3.0), Point::new(-2.0, 1.0), Point::new(-2.0, -1.0), Point::new(-3.0, -3.0)];
        let w = v.map(|p| p.scale(-1.0));
        K4Frame {
            k,
            tau,
            s_ab: (v[0], v[1]),
            s_ba: (v[2], v[3]),
            s_cd: (w[0], w[1]),
            s_dc: (w[2], w[3]),
        }
    }

    fn p(&self, s: (Point, Point), x: usize, y: usize) -> Point {
        pair_point(s, x, y, self.k, self.tau)
    }

    fn left(&self, a: usize, b: usize) -> Shape {
        seg(self.p(self.s_ab, a, b), self.p(self.s_ba, b, a))
    }

    fn right(&self, c: usize, d: usize) -> Shape {
        seg(self.p(self.s_cd, c, d), self.p(self.s_dc, d, c))
    }

    /// `(inner end, outer end, far endpoint of the opposite segment)` of the
    /// cluster of vertex `x` of `part`. Every segment of the cluster joins
    /// the side `inner–outer` to the opposite segment.
    fn cluster(&self, part: Part, x: usize) -> (Point, Point, Point) {
        let k = self.k;
        match part {
            Part::A => (self.p(self.s_ab, x, k), self.p(self.s_ab, x, 1), self.s_ba.1),
            Part::B => (self.p(self.s_ba, x, 1), self.p(self.s_ba, x, k), self.s_ab.0),
            Part::C => (self.p(self.s_cd, x, k), self.p(self.s_cd, x, 1), self.s_dc.1),
            Part::D => (self.p(self.s_dc, x, 1), self.p(self.s_dc, x, k), self.s_cd.0),
        }
    }

    /// The crossing segment for the pair `(x ∈ X, y ∈ Y)`: on the line
    /// through the inner ends of both clusters, clipped by the lines joining
    /// each cluster's outer end to the far endpoint of its opposite segment.
    fn crossing(&self, px: Part, x: usize, py: Part, y: usize) -> Result<Shape> {
        let (ix, ox, fx) = self.cluster(px, x);
        let (iy, oy, fy) = self.cluster(py, y);
        let u = line_intersection(ix, iy, ox, fx)?;
        let u2 = line_intersection(ix, iy, oy, fy)?;
        Ok(seg(u, u2))
    }
}

fn seg(a: Point, b: Point) -> Shape {
    Shape::Segment { a, b, slope_class: 0 }
}

fn line_intersection(p1: Point, p2: Point, q1: Point, q2: Point) -> Result<Point> {
    let (d1, d2) = (p2.sub(p1), q2.sub(q1));
    let den = d1.cross(d2);
    if den.abs() <= 1e-12 * d1.norm() * d2.norm() {
        return Err(invalid("parallel construction lines".into()));
    }
    Ok(p1.add(d1.scale(q1.sub(p1).cross(d2) / den)))
}

/// Assigns slope classes to segments, building a table of their distinct
/// directions.
fn classify_segments(shapes: &mut [Shape]) -> Result<SlopeTable> {
    let mut dirs: Vec<Point> = Vec::new();
    for s in shapes.iter_mut() {
        if let Shape::Segment { a, b, slope_class } = s {
            let v = b.sub(*a);
            let class = match dirs.iter().position(|d| v.cross(*d).abs() <= 1e-9 * v.norm() * d.norm()) {
                Some(i) => i,
                None => {
                    dirs.push(v);
                    dirs.len() - 1
                }
            };
            *slope_class = class as u32 + 1;
        }
    }
    SlopeTable::new(dirs)
}

/// Segments whose intersection graph has diameter at most 2 iff `g` has no
/// 4-clique, starting from spacing `tau` and doubling it (up to 64) until
/// the crossing segments pass validation.
///
/// Left segments join `p_AB(a,b)` to `p_BA(b,a)` for every A–B edge, right
/// segments join `p_CD(c,d)` to `p_DC(d,c)` for every C–D edge, a crossing
/// segment is added for every missing crossing edge, and five dummy
/// segments (a square and its vertical diagonal) connect everything else.
pub fn gen_k4_segments(g: &FourPartiteGraph, tau: f64) -> Result<GeneratedInstance> {
    if !(tau >= 2.0) || !tau.is_finite() {
        return Err(GeoError::Parameter("tau must be a finite number ≥ 2".into()));
    }
    let mut t = tau;
    loop {
        match build_k4(g, t) {
            Err(GeoError::ConstructionInvalid(msg)) => {
                if t * 2.0 > 64.0 {
                    return Err(invalid(format!("construction invalid for (k={}, τ={t}): {msg}", g.k)));
                }
                t *= 2.0;
            }
            other => return other,
        }
    }
}

fn build_k4(g: &FourPartiteGraph, tau: f64) -> Result<GeneratedInstance> {
    let k = g.k;
    let f = K4Frame::new(k, tau);
    let cfg = PredicateConfig::default();
    let mut shapes = Vec::new();
    let mut labels = Vec::new();
    let mut side = Vec::new(); // 0 left, 1 right, 2 other
    for a in 1..=k {
        for b in 1..=k {
            if g.has(K4Pair::AB, a, b) {
                shapes.push(f.left(a, b));
                labels.push(format!("t_AB({a},{b})"));
                side.push(0);
            }
        }
    }
    for c in 1..=k {
        for d in 1..=k {
            if g.has(K4Pair::CD, c, d) {
                shapes.push(f.right(c, d));
                labels.push(format!("t_CD({c},{d})"));
                side.push(1);
            }
        }
    }
    let all_left: Vec<((usize, usize), Shape)> =
        (1..=k).flat_map(|a| (1..=k).map(move |b| (a, b))).map(|(a, b)| ((a, b), f.left(a, b))).collect();
    let all_right: Vec<((usize, usize), Shape)> =
        (1..=k).flat_map(|c| (1..=k).map(move |d| (c, d))).map(|(c, d)| ((c, d), f.right(c, d))).collect();
    let crossing = [
        (K4Pair::AC, Part::A, Part::C, "AC"),
        (K4Pair::AD, Part::A, Part::D, "AD"),
        (K4Pair::BC, Part::B, Part::C, "BC"),
        (K4Pair::BD, Part::B, Part::D, "BD"),
    ];
    let mut crossing_pairs = 0;
    for (pair, px, py, name) in crossing {
        for x in 1..=k {
            for y in 1..=k {
                if g.has(pair, x, y) {
                    continue;
                }
                let h = f.crossing(px, x, py, y)?;
                // h meets a left segment iff that segment's X-coordinate is
                // x, and a right segment iff its Y-coordinate is y.
                for ((a, b), t) in &all_left {
                    let want = if px == Part::A { *a == x } else { *b == x };
                    if intersects(&h, t, &cfg)? != want {
                        return Err(invalid(format!("h_{name}({x},{y}) vs t_AB({a},{b})")));
                    }
                    crossing_pairs += 1;
                }
                for ((c, d), t) in &all_right {
                    let want = if py == Part::C { *c == y } else { *d == y };
                    if intersects(&h, t, &cfg)? != want {
                        return Err(invalid(format!("h_{name}({x},{y}) vs t_CD({c},{d})")));
                    }
                    crossing_pairs += 1;
                }
                shapes.push(h);
                labels.push(format!("h_{name}({x},{y})"));
                side.push(2);
            }
        }
    }
    let sq = [Point::new(-3.0, 0.0), Point::new(0.0, -3.0), Point::new(3.0, 0.0), Point::new(0.0, 3.0)];
    for i in 0..4 {
        shapes.push(seg(sq[i], sq[(i + 1) % 4]));
        labels.push("dummy".into());
        side.push(2);
    }
    shapes.push(seg(sq[3], sq[1]));
    labels.push("dummy".into());
    side.push(2);
    let table = classify_segments(&mut shapes)?;
    let near = check_distances(&shapes, |u, v| side[u] + side[v] == 1)?;
    Ok(GeneratedInstance {
        shapes,
        labels,
        slope_table: Some(table),
        expected: Expected {
            question: Question::DiameterAtMost(2),
            answer: !g.has_4clique(),
        },
        validation: ValidationReport {
            checks: vec![
                ("crossing segment vs cluster segments".into(), crossing_pairs),
                ("pairs within distance 2".into(), near),
            ],
            tau: Some(tau),
        },
    })
}

// ---------------------------------------------------------------------------
// 6-hyperclique → diameter 2 of triangles.

/// The six parts A–F of a 6-partite 3-uniform hypergraph.
const PARTS: [char; 6] = ['A', 'B', 'C', 'D', 'E', 'F'];

/// A 6-partite 3-uniform hypergraph with `k` vertices per part; hyperedges
/// take one vertex from each of three distinct parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SixPartiteHypergraph {
    k: usize,
    /// Presence per part triple (in [`Self::triples`] order) over `[k]³`.
    edges: Vec<Vec<bool>>,
}

impl SixPartiteHypergraph {
    /// The 20 part triples `(i, j, l)`, `i < j < l`, as indices into A–F.
    pub fn triples() -> Vec<[usize; 3]> {
        let mut t = Vec::new();
        for i in 0..6 {
            for j in i + 1..6 {
                for l in j + 1..6 {
                    t.push([i, j, l]);
                }
            }
        }
        t
    }

    fn triple_index(parts: [usize; 3]) -> usize {
        let mut p = parts;
        p.sort_unstable();
        Self::triples().iter().position(|t| *t == p).expect("three distinct parts")
    }

    /// The hypergraph without hyperedges.
    pub fn empty(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(GeoError::Parameter("k must be at least 1".into()));
        }
        Ok(SixPartiteHypergraph {
            k,
            edges: vec![vec![false; k * k * k]; 20],
        })
    }

    /// Every hyperedge present independently with probability `p`.
    pub fn random(k: usize, p: f64, rng: &mut impl Rng) -> Result<Self> {
        let mut h = Self::empty(k)?;
        for e in &mut h.edges {
            e.iter_mut().for_each(|b| *b = rng.gen_bool(p));
        }
        Ok(h)
    }

    /// Part size.
    pub fn k(&self) -> usize {
        self.k
    }

    fn slot(&self, parts: [usize; 3], verts: [usize; 3]) -> (usize, usize) {
        let mut pv: Vec<(usize, usize)> = parts.iter().copied().zip(verts).collect();
        pv.sort_unstable();
        let k = self.k;
        let idx = ((pv[0].1 - 1) * k + (pv[1].1 - 1)) * k + (pv[2].1 - 1);
        (Self::triple_index([pv[0].0, pv[1].0, pv[2].0]), idx)
    }

    /// Whether the vertices `verts` (1-based) of the distinct parts `parts`
    /// (indices into A–F, any order) form a hyperedge.
    pub fn has(&self, parts: [usize; 3], verts: [usize; 3]) -> bool {
        let (t, i) = self.slot(parts, verts);
        self.edges[t][i]
    }

    /// Adds or removes a hyperedge.
    pub fn set(&mut self, parts: [usize; 3], verts: [usize; 3], present: bool) {
        let (t, i) = self.slot(parts, verts);
        self.edges[t][i] = present;
    }

    /// True when some choice of one vertex per part has all 20 triples
    /// present.
    pub fn has_hyperclique(&self) -> bool {
        let k = self.k;
        let triples = Self::triples();
        let mut v = [1usize; 6];
        loop {
            if triples.iter().all(|t| self.has(*t, [v[t[0]], v[t[1]], v[t[2]]])) {
                return true;
            }
            let mut i = 0;
            while i < 6 && v[i] == k {
                v[i] = 1;
                i += 1;
            }
            if i == 6 {
                return false;
            }
            v[i] += 1;
        }
    }
}

/// Placement of the triangle construction.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainCoords {
    /// Six vertices of the left convex chain, top to bottom; the right chain
    /// is its reflection through the origin.
    pub left: [Point; 6],
    /// Spacing parameter τ ≥ 2.
    pub tau: f64,
}

impl Default for ChainCoords {
    fn default() -> Self {
        ChainCoords {
            left: [
                Point::new(-3.0, 3.0),
                Point::new(-2.6, 1.2),
                Point::new(-2.5, 0.5),
                Point::new(-2.5, -0.5),
                Point::new(-2.6, -1.2),
                Point::new(-3.0, -3.0),
            ],
            tau: 2.0,
        }
    }
}

/// True when the segment `pq` meets the interior of the convex polygon
/// `poly` (counter-clockwise) by more than `tol`.
fn segment_enters_interior(p: Point, q: Point, poly: &[Point], tol: f64) -> bool {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let d = q.sub(p);
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let e = b.sub(a);
        let len = e.norm();
        // Inside means signed distance > tol from this edge.
        let s0 = e.cross(p.sub(a)) / len - tol;
        let ds = e.cross(d) / len;
        if ds.abs() < 1e-15 {
            if s0 <= 0.0 {
                return false;
            }
        } else if ds > 0.0 {
            lo = lo.max(-s0 / ds);
        } else {
            hi = hi.min(-s0 / ds);
        }
        if lo >= hi {
            return false;
        }
    }
    lo < hi
}

/// Counter-clockwise convex hull (monotone chain).
fn convex_hull(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut h: Vec<Point> = Vec::new();
    for pass in 0..2 {
        let start = h.len();
        let it: Box<dyn Iterator<Item = &Point>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in it {
            while h.len() >= start + 2 && h[h.len() - 2].sub(h[h.len() - 1]).cross(p.sub(h[h.len() - 1])) >= 0.0 {
                h.pop();
            }
            h.push(p);
        }
        h.pop();
    }
    h
}

struct H6Frame {
    k: usize,
    tau: f64,
    /// Segments `s_AB, s_BC, s_CA, s_DE, s_EF, s_FD`.
    segs: [(Point, Point); 6],
}

impl H6Frame {
    /// Point `p_XY(x, y)` on the segment of pair `pair` (0..6 as above).
    fn p(&self, pair: usize, x: usize, y: usize) -> Point {
        pair_point(self.segs[pair], x, y, self.k, self.tau)
    }
}

/// Pair segment index whose first part is `part` (A→AB, B→BC, C→CA, D→DE,
/// E→EF, F→FD) and the part that follows it.
fn pair_of_first(part: usize) -> (usize, usize) {
    let next = if part < 3 { (part + 1) % 3 } else { 3 + (part - 3 + 1) % 3 };
    (part, next)
}

/// For two distinct parts of one side, the pair segment joining them and the
/// parts in segment order.
fn pair_of_two(p: usize, q: usize) -> (usize, usize, usize) {
    let (seg_p, next_p) = pair_of_first(p);
    if next_p == q {
        (seg_p, p, q)
    } else {
        let (seg_q, _) = pair_of_first(q);
        (seg_q, q, p)
    }
}

/// Triangles whose intersection graph has diameter at most 2 iff `g` has no
/// 6-hyperclique.
///
/// Edge triangles `Δ_ABC(a,b,c)` and `Δ_DEF(d,e,f)` join the points of their
/// three vertex pairs; for every missing crossing triple a crossing triangle
/// joins the point of its two-part pair to the cluster of its single part;
/// two dummy triangles cover each side and touch at the origin.
pub fn gen_h6_triangles(g: &SixPartiteHypergraph, coords: &ChainCoords) -> Result<GeneratedInstance> {
    if !(coords.tau >= 2.0) || !coords.tau.is_finite() {
        return Err(GeoError::Parameter("tau must be a finite number ≥ 2".into()));
    }
    if coords.left.iter().any(|p| !p.is_finite()) {
        return Err(GeoError::Parameter("non-finite chain coordinate".into()));
    }
    let k = g.k;
    let l = coords.left;
    let r = l.map(|p| p.scale(-1.0));
    let f = H6Frame {
        k,
        tau: coords.tau,
        segs: [(l[0], l[1]), (l[2], l[3]), (l[4], l[5]), (r[0], r[1]), (r[2], r[3]), (r[4], r[5])],
    };
    let cfg = PredicateConfig::default();

    // Visibility: segments between the chains avoid both hull interiors.
    let hull_l = convex_hull(l.to_vec());
    let hull_r = convex_hull(r.to_vec());
    let mut sample_l: Vec<Point> = l.to_vec();
    let mut sample_r: Vec<Point> = r.to_vec();
    for pair in 0..6 {
        for x in 1..=k {
            for y in 1..=k {
                let target = if pair < 3 { &mut sample_l } else { &mut sample_r };
                target.push(f.p(pair, x, y));
            }
        }
    }
    let mut visibility = 0;
    for &p in &sample_l {
        for &q in &sample_r {
            if segment_enters_interior(p, q, &hull_l, 1e-9) || segment_enters_interior(p, q, &hull_r, 1e-9) {
                return Err(invalid(format!("chain coordinates: segment {p:?}–{q:?} enters a hull")));
            }
            visibility += 1;
        }
    }

    let tri = |a: Point, b: Point, c: Point| Shape::Triangle { a, b, c };
    let mut shapes = Vec::new();
    let mut labels = Vec::new();
    // Edge triangles with their side and vertex values (indexed by part).
    let mut edge_tris: Vec<(usize, [usize; 6])> = Vec::new();
    let mut kinds = Vec::new(); // 0 left edge, 1 right edge, 2 crossing, 3 dummy L, 4 dummy R
    for side in 0..2 {
        let base = 3 * side;
        let parts = [base, base + 1, base + 2];
        for x in 1..=k {
            for y in 1..=k {
                for z in 1..=k {
                    if !g.has(parts, [x, y, z]) {
                        continue;
                    }
                    shapes.push(tri(f.p(base, x, y), f.p(base + 1, y, z), f.p(base + 2, z, x)));
                    let n: String = parts.iter().map(|&i| PARTS[i]).collect();
                    labels.push(format!("Δ_{n}({x},{y},{z})"));
                    let mut vals = [0usize; 6];
                    vals[base] = x;
                    vals[base + 1] = y;
                    vals[base + 2] = z;
                    edge_tris.push((side, vals));
                    kinds.push(side);
                }
            }
        }
    }
    // Crossing triangles: (two-part side, pair segment, its parts, single part).
    let mut crossing: Vec<(Shape, usize, usize, usize, usize, usize, usize)> = Vec::new();
    for t in SixPartiteHypergraph::triples() {
        let left: Vec<usize> = t.iter().copied().filter(|&p| p < 3).collect();
        if left.len() == 3 || left.is_empty() {
            continue;
        }
        let (two, single): (Vec<usize>, usize) = if left.len() == 2 {
            (left, *t.iter().find(|&&p| p >= 3).unwrap())
        } else {
            (t.iter().copied().filter(|&p| p >= 3).collect(), left[0])
        };
        let (pair_seg, p1, p2) = pair_of_two(two[0], two[1]);
        let (single_seg, _) = pair_of_first(single);
        for x in 1..=k {
            for y in 1..=k {
                for z in 1..=k {
                    if g.has([p1, p2, single], [x, y, z]) {
                        continue;
                    }
                    let shape = tri(f.p(pair_seg, x, y), f.p(single_seg, z, 1), f.p(single_seg, z, k));
                    crossing.push((shape, p1, p2, single, x, y, z));
                }
            }
        }
    }
    for (shape, p1, p2, s, x, y, z) in &crossing {
        shapes.push(shape.clone());
        labels.push(format!("Δ_{}{}{}({x},{y},{z})", PARTS[*p1], PARTS[*p2], PARTS[*s]));
        kinds.push(2);
    }
    let dl = tri(Point::new(0.0, 0.0), Point::new(-10.0, 12.0), Point::new(-10.0, -12.0));
    let dr = tri(Point::new(0.0, 0.0), Point::new(10.0, -12.0), Point::new(10.0, 12.0));
    shapes.push(dl.clone());
    labels.push("Δ_L".into());
    kinds.push(3);
    shapes.push(dr.clone());
    labels.push("Δ_R".into());
    kinds.push(4);

    // Observation checks, pairwise by brute force.
    let edge_shapes: Vec<&Shape> = shapes.iter().take(edge_tris.len()).collect();
    let mut item_counts = [0usize; 5];
    for (ci, (c, p1, p2, s, x, y, _z)) in crossing.iter().enumerate() {
        let two_side = usize::from(*p1 >= 3);
        for (ei, (side, vals)) in edge_tris.iter().enumerate() {
            let meet = intersects(c, edge_shapes[ei], &cfg)?;
            let (want, item) = if *side == two_side {
                (vals[*p1] == *x && vals[*p2] == *y, 0)
            } else {
                (vals[*s] == crossing[ci].6, 1)
            };
            if meet != want {
                return Err(invalid(format!(
                    "crossing triangle {} vs {}: intersection is {meet}",
                    labels[edge_tris.len() + ci],
                    labels[ei]
                )));
            }
            item_counts[item] += 1;
        }
        if !intersects(c, &dl, &cfg)? || !intersects(c, &dr, &cfg)? {
            return Err(invalid(format!("crossing triangle {} misses a dummy", labels[edge_tris.len() + ci])));
        }
        item_counts[3] += 1;
    }
    for (i, (si, _)) in edge_tris.iter().enumerate() {
        for (j, (sj, _)) in edge_tris.iter().enumerate().skip(i + 1) {
            if si != sj {
                if intersects(edge_shapes[i], edge_shapes[j], &cfg)? {
                    return Err(invalid(format!("{} meets {}", labels[i], labels[j])));
                }
                item_counts[2] += 1;
            }
        }
        let (own, other) = if *si == 0 { (&dl, &dr) } else { (&dr, &dl) };
        if !intersects(edge_shapes[i], own, &cfg)? || intersects(edge_shapes[i], other, &cfg)? {
            return Err(invalid(format!("{} has the wrong dummy contacts", labels[i])));
        }
        item_counts[4] += 1;
    }
    let near = check_distances(&shapes, |u, v| kinds[u] + kinds[v] == 1)?;
    let names = [
        "crossing vs edge triangles sharing its pair",
        "crossing vs edge triangles sharing its single part",
        "left vs right edge triangles disjoint",
        "crossing triangles meet both dummies",
        "edge triangles meet only their own dummy",
    ];
    let mut checks: Vec<(String, usize)> = names.iter().map(|s| s.to_string()).zip(item_counts).collect();
    checks.push(("chain visibility segments".into(), visibility));
    checks.push(("pairs within distance 2".into(), near));
    Ok(GeneratedInstance {
        shapes,
        labels,
        slope_table: None,
        expected: Expected {
            question: Question::DiameterAtMost(2),
            answer: !g.has_hyperclique(),
        },
        validation: ValidationReport {
            checks,
            tau: Some(coords.tau),
        },
    })
}

/// The fat-triangle variant of the triangle construction is not generated.
pub fn gen_fat_triangles(_g: &SixPartiteHypergraph) -> Result<GeneratedInstance> {
    Err(GeoError::UnsupportedConstruction(
        "fat (half-square) triangles are not generated".into(),
    ))
}

/// The three-slope segment construction is not generated.
pub fn gen_three_slope_segments() -> Result<GeneratedInstance> {
    Err(GeoError::UnsupportedConstruction(
        "three-slope segment instances are not generated".into(),
    ))
}
