//! Diameter decision for segments with few slopes by rainbow-ball growing.
//!
//! Every segment's color is its slope class. For a color sequence `S` and a
//! vertex `v` with `χ(v) = S[1]`, the rainbow ball `B_S(v)` is the set of
//! vertices reachable from `v` along a path whose color sequence embeds into
//! `S` with `v` matched to `S[1]`. It obeys
//!
//! `B_S(v) = B_{S[1]∘S[3:]}(v) ∪ ⋃_{w ∈ N[v], χ(w) = S[2]} B_{S[2:]}(w)`,
//!
//! so balls are grown for sequences in order of length. Each ball is stored
//! as a set of intervals over a vertex ordering, and the union on the right
//! is computed with a [`CoverIndex`] query per vertex. For other vertices the
//! ball is obtained by deleting the prefix of `S` before the first occurrence
//! of `χ(v)` (and is empty if `χ(v)` does not occur).
//!
//! `N^Δ[v]` is the union of `B_S(v)` over all sequences of length at most
//! `Δ + 1`, which decides whether the diameter is at most `Δ`.

mod cover;
mod parallel;

use std::collections::{HashMap, VecDeque};

pub use cover::{covers_query, interval_search, ris_all_colors, CoverIndex, IntervalRep, RainbowIndex};

use crate::error::{GeoError, Result};
use crate::geometry::{Point, PredicateConfig, Shape, SlopeTable};
use crate::oracle::{build_graph, IntersectionGraph};
use cover::segment_parts;

/// A nonempty sequence of colors (slope classes) drawn from `1..=h`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColorSequence(Vec<u32>);

impl ColorSequence {
    /// Validates a sequence against `h` registered slopes.
    pub fn new(colors: Vec<u32>, h: usize) -> Result<Self> {
        if colors.is_empty() {
            return Err(GeoError::Parameter("color sequence is empty".into()));
        }
        if let Some(c) = colors.iter().find(|&&c| c == 0 || c as usize > h) {
            return Err(GeoError::Parameter(format!("color {c} outside 1..={h}")));
        }
        Ok(ColorSequence(colors))
    }

    /// The colors.
    pub fn colors(&self) -> &[u32] {
        &self.0
    }

    /// Sequence length.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; sequences are nonempty.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when `self` is a (not necessarily contiguous) subsequence of
    /// `other`.
    pub fn is_subsequence_of(&self, other: &ColorSequence) -> bool {
        let mut it = other.0.iter();
        self.0.iter().all(|c| it.any(|d| d == c))
    }

    /// All sequences over `1..=h` of lengths `1..=max_len`, shortest first
    /// and lexicographic within a length.
    pub fn all_up_to(h: usize, max_len: usize) -> Vec<ColorSequence> {
        let mut out = Vec::new();
        let mut layer: Vec<Vec<u32>> = vec![Vec::new()];
        for _ in 0..max_len {
            layer = layer
                .iter()
                .flat_map(|s| {
                    (1..=h as u32).map(move |c| {
                        let mut t = s.clone();
                        t.push(c);
                        t
                    })
                })
                .collect();
            out.extend(layer.iter().cloned().map(ColorSequence));
        }
        out
    }
}

/// A vertex ordering λ: `perm[i]` is the vertex at position `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ordering {
    /// Vertex at each position.
    pub perm: Vec<u32>,
    /// Position of each vertex.
    pub inverse: Vec<u32>,
    /// Total number of maximal intervals over all closed neighborhoods
    /// `N[v]` under this ordering.
    pub interval_count: usize,
    /// True when the ordering is a breadth-first order of a connected graph;
    /// false when the space-filling-curve fallback was used.
    pub breadth_first: bool,
}

impl Ordering {
    /// Builds an ordering from a permutation and measures interval counts
    /// in `g`.
    pub fn from_permutation(perm: Vec<u32>, g: &IntersectionGraph, breadth_first: bool) -> Result<Self> {
        let n = perm.len();
        if n != g.n {
            return Err(GeoError::Parameter("permutation length differs from vertex count".into()));
        }
        let mut inverse = vec![u32::MAX; n];
        for (i, &v) in perm.iter().enumerate() {
            if v as usize >= n || inverse[v as usize] != u32::MAX {
                return Err(GeoError::Parameter("not a permutation".into()));
            }
            inverse[v as usize] = i as u32;
        }
        let interval_count = (0..n)
            .map(|v| {
                let pos = g.adjacency[v]
                    .iter()
                    .map(|&w| inverse[w as usize])
                    .chain(std::iter::once(inverse[v]));
                IntervalRep::from_positions(pos).intervals.len()
            })
            .sum();
        Ok(Ordering {
            perm,
            inverse,
            interval_count,
            breadth_first,
        })
    }

    /// Vertices of an interval representation, ascending.
    pub fn vertices(&self, rep: &IntervalRep) -> Vec<usize> {
        let mut v: Vec<usize> = rep.positions().iter().map(|&p| self.perm[p as usize] as usize).collect();
        v.sort_unstable();
        v
    }

    /// Interval representation of a vertex set.
    pub fn rep_of(&self, vertices: &[usize]) -> IntervalRep {
        IntervalRep::from_positions(vertices.iter().map(|&v| self.inverse[v]))
    }
}

/// Index of `p` along a Hilbert curve over a `2^16 × 2^16` grid.
fn hilbert_index(mut x: u32, mut y: u32) -> u64 {
    let n: u32 = 1 << 16;
    let mut d = 0u64;
    let mut s = n / 2;
    while s > 0 {
        let rx = u32::from(x & s > 0);
        let ry = u32::from(y & s > 0);
        d += s as u64 * s as u64 * ((3 * rx) ^ ry) as u64;
        if ry == 0 {
            if rx == 1 {
                x = n - 1 - x;
                y = n - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}

fn hilbert_order(mids: &[Point]) -> Vec<u32> {
    let (mut lo, mut hi) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for m in mids {
        lo = Point::new(lo.x.min(m.x), lo.y.min(m.y));
        hi = Point::new(hi.x.max(m.x), hi.y.max(m.y));
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
    let cell = |v: f64| ((v / span) * 65535.0).round().clamp(0.0, 65535.0) as u32;
    let mut keyed: Vec<(u64, u32)> = mids
        .iter()
        .enumerate()
        .map(|(i, m)| (hilbert_index(cell(m.x - lo.x), cell(m.y - lo.y)), i as u32))
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, i)| i).collect()
}

/// Orders the vertices of a segment intersection graph: breadth-first from
/// the lowest (then leftmost) segment with neighbors in index order, or, if
/// the graph is disconnected, along a Hilbert curve through the segment
/// midpoints.
pub fn compute_ordering(g: &IntersectionGraph) -> Result<Ordering> {
    let n = g.n;
    if n == 0 {
        return Err(GeoError::Parameter("ordering needs at least one vertex".into()));
    }
    let low = |s: &Shape| {
        let p = s.points();
        let (a, b) = (p[0], p[1]);
        (a.y.min(b.y), a.x.min(b.x))
    };
    let root = (0..n)
        .min_by(|&i, &j| {
            let (a, b) = (low(&g.shapes[i]), low(&g.shapes[j]));
            a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(i.cmp(&j))
        })
        .unwrap_or(0);
    let mut seen = vec![false; n];
    let mut perm = Vec::with_capacity(n);
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(u) = queue.pop_front() {
        perm.push(u as u32);
        for &w in &g.adjacency[u] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                queue.push_back(w as usize);
            }
        }
    }
    if perm.len() == n {
        return Ordering::from_permutation(perm, g, true);
    }
    let mids: Vec<Point> = g
        .shapes
        .iter()
        .map(|s| {
            let p = s.points();
            p[0].midpoint(p[p.len() - 1])
        })
        .collect();
    Ordering::from_permutation(hilbert_order(&mids), g, false)
}

/// Counters collected while growing balls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GrowStats {
    /// Sequences whose tables were computed.
    pub sequences: usize,
    /// Total interval copies stored in cover indices.
    pub cover_copies: usize,
    /// Interval-search queries issued.
    pub queries: usize,
}

/// Memoized rainbow-ball tables over one segment set and ordering.
#[derive(Clone, Debug)]
pub struct BallGrower {
    shapes: Vec<Shape>,
    colors: Vec<u32>,
    h: usize,
    table: SlopeTable,
    cfg: PredicateConfig,
    ordering: Ordering,
    memo: HashMap<Vec<u32>, Vec<IntervalRep>>,
    stats: GrowStats,
}

impl BallGrower {
    /// Prepares ball growing for validated segments under `ordering`.
    pub fn new(shapes: &[Shape], ordering: Ordering, table: &SlopeTable, cfg: &PredicateConfig) -> Result<Self> {
        if shapes.is_empty() {
            return Err(GeoError::Parameter("no segments".into()));
        }
        if ordering.perm.len() != shapes.len() {
            return Err(GeoError::Parameter("ordering does not match the segment count".into()));
        }
        let colors = shapes
            .iter()
            .enumerate()
            .map(|(i, s)| segment_parts(s, i, table).map(|p| p.2))
            .collect::<Result<Vec<_>>>()?;
        Ok(BallGrower {
            shapes: shapes.to_vec(),
            colors,
            h: table.len(),
            table: table.clone(),
            cfg: *cfg,
            ordering,
            memo: HashMap::new(),
            stats: GrowStats::default(),
        })
    }

    /// The ordering balls are expressed in.
    pub fn ordering(&self) -> &Ordering {
        &self.ordering
    }

    /// Counters so far.
    pub fn stats(&self) -> GrowStats {
        self.stats
    }

    fn table_of(&self, s: &[u32]) -> Result<&Vec<IntervalRep>> {
        self.memo
            .get(s)
            .ok_or_else(|| GeoError::Dependency(format!("table for sequence {s:?} has not been grown")))
    }

    /// `B_S(v)` with prefix deletion for `χ(v) ≠ S[1]`; requires the table of
    /// the stripped sequence.
    pub fn ball(&self, s: &ColorSequence, v: usize) -> Result<IntervalRep> {
        let c = self.colors[v];
        match s.0.iter().position(|&x| x == c) {
            None => Ok(IntervalRep::empty()),
            Some(j) => Ok(self.table_of(&s.0[j..])?[v].clone()),
        }
    }

    /// All balls `B_S(v)`, indexed by vertex.
    pub fn balls(&self, s: &ColorSequence) -> Result<Vec<IntervalRep>> {
        (0..self.shapes.len()).map(|v| self.ball(s, v)).collect()
    }

    /// Computes and memoizes the table of `s` (balls of vertices colored
    /// `S[1]`). The tables of `S[1]∘S[3:]` and `S[2:]` must already exist.
    pub fn grow(&mut self, s: &ColorSequence) -> Result<()> {
        if s.0.iter().any(|&c| c == 0 || c as usize > self.h) {
            return Err(GeoError::Parameter(format!("sequence {:?} uses an unregistered color", s.0)));
        }
        if self.memo.contains_key(&s.0) {
            return Ok(());
        }
        let n = self.shapes.len();
        let first = s.0[0];
        let mut out = vec![IntervalRep::empty(); n];
        if s.len() == 1 {
            for (v, rep) in out.iter_mut().enumerate() {
                if self.colors[v] == first {
                    *rep = IntervalRep::from_positions([self.ordering.inverse[v]]);
                }
            }
        } else {
            let skip: Vec<u32> = std::iter::once(first).chain(s.0[2..].iter().copied()).collect();
            let tail = &s.0[1..];
            let skip_table = self.table_of(&skip)?;
            let tail_table = self.table_of(tail)?;
            let objects: Vec<(Shape, IntervalRep)> = (0..n)
                .filter(|&w| self.colors[w] == s.0[1])
                .map(|w| (self.shapes[w].clone(), tail_table[w].clone()))
                .collect();
            let ci = CoverIndex::new(&objects, n as u32, &self.table, &self.cfg)?;
            let mut queries = 0;
            for (v, rep) in out.iter_mut().enumerate() {
                if self.colors[v] == first {
                    *rep = interval_search(&ci, &self.shapes[v], &skip_table[v])?;
                    queries += 1;
                }
            }
            self.stats.cover_copies += ci.copies();
            self.stats.queries += queries;
        }
        self.stats.sequences += 1;
        self.memo.insert(s.0.clone(), out);
        Ok(())
    }

    /// Grows `s` and returns all its balls.
    pub fn grow_balls(&mut self, s: &ColorSequence) -> Result<Vec<IntervalRep>> {
        self.grow(s)?;
        self.balls(s)
    }

    /// Grows every sequence of length at most `max_len`, shortest first.
    pub fn grow_all(&mut self, max_len: usize) -> Result<()> {
        for s in ColorSequence::all_up_to(self.h, max_len) {
            self.grow(&s)?;
        }
        Ok(())
    }
}

/// Outcome of [`segment_diam_at_most_with`] with diagnostics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentDiamReport {
    /// True iff the diameter is at most the requested bound.
    pub answer: bool,
    /// Interval count of the ordering used.
    pub interval_count: usize,
    /// Whether the ordering was breadth-first.
    pub breadth_first: bool,
    /// Ball-growing counters.
    pub stats: GrowStats,
}

/// Decides whether the intersection graph of segments with slope classes in
/// `1..=h` (default slope table) has diameter at most `delta`.
pub fn segment_diam_at_most(segments: &[Shape], delta: u32, h: usize) -> Result<bool> {
    let table = SlopeTable::first(h)?;
    Ok(segment_diam_at_most_with(segments, delta, &table, &PredicateConfig::default())?.answer)
}

/// [`segment_diam_at_most`] for an explicit slope table and tolerance.
pub fn segment_diam_at_most_with(
    segments: &[Shape],
    delta: u32,
    table: &SlopeTable,
    cfg: &PredicateConfig,
) -> Result<SegmentDiamReport> {
    if segments.is_empty() {
        return Err(GeoError::Parameter("no segments".into()));
    }
    for (i, s) in segments.iter().enumerate() {
        segment_parts(s, i, table)?;
    }
    let n = segments.len();
    let g = build_graph(segments, cfg)?;
    let ordering = compute_ordering(&g)?;
    let (interval_count, breadth_first) = (ordering.interval_count, ordering.breadth_first);
    if n == 1 || delta == 0 {
        return Ok(SegmentDiamReport {
            answer: n == 1,
            interval_count,
            breadth_first,
            stats: GrowStats::default(),
        });
    }
    let mut grower = BallGrower::new(segments, ordering, table, cfg)?;
    let seqs = ColorSequence::all_up_to(table.len(), delta as usize + 1);
    for s in &seqs {
        grower.grow(s)?;
    }
    let mut answer = true;
    for v in 0..n {
        let mut reach = IntervalRep::empty();
        for s in &seqs {
            reach = reach.union(&grower.ball(s, v)?);
        }
        if !reach.covers(0, n as u32 - 1) {
            answer = false;
            break;
        }
    }
    Ok(SegmentDiamReport {
        answer,
        interval_count,
        breadth_first,
        stats: grower.stats(),
    })
}

/// Reference rainbow ball: breadth-first search over (vertex, matched
/// position) pairs, matching each next vertex to the earliest later position
/// of its color. Returns the sorted vertex set.
pub fn rainbow_ball_reference(g: &IntersectionGraph, colors: &[u32], v: usize, s: &[u32]) -> Vec<usize> {
    let k = s.len();
    let Some(start) = s.iter().position(|&c| c == colors[v]) else {
        return Vec::new();
    };
    let mut seen = vec![false; g.n * k];
    let mut queue = VecDeque::from([(v, start)]);
    seen[v * k + start] = true;
    let mut hit = vec![false; g.n];
    while let Some((u, i)) = queue.pop_front() {
        hit[u] = true;
        for &w in &g.adjacency[u] {
            let w = w as usize;
            if let Some(off) = s[i + 1..].iter().position(|&c| c == colors[w]) {
                let j = i + 1 + off;
                if !seen[w * k + j] {
                    seen[w * k + j] = true;
                    queue.push_back((w, j));
                }
            }
        }
    }
    (0..g.n).filter(|&u| hit[u]).collect()
}
