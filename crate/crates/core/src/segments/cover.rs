//! Interval representations and the cover index over an ordering.

use super::parallel::{ParallelSet, Seg};
use crate::error::{GeoError, Result};
use crate::geometry::{Point, PredicateConfig, Shape, SlopeTable};

/// A set of positions as sorted, disjoint, maximal inclusive intervals
/// (no two intervals touch).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntervalRep {
    /// The intervals `(first, last)`, inclusive.
    pub intervals: Vec<(u32, u32)>,
}

impl IntervalRep {
    /// The empty set.
    pub fn empty() -> Self {
        IntervalRep::default()
    }

    /// Normalizes arbitrary inclusive intervals (empty ones are dropped).
    pub fn from_intervals(mut iv: Vec<(u32, u32)>) -> Self {
        iv.retain(|&(l, r)| l <= r);
        iv.sort_unstable();
        let mut out: Vec<(u32, u32)> = Vec::with_capacity(iv.len());
        for (l, r) in iv {
            match out.last_mut() {
                Some(last) if l as u64 <= last.1 as u64 + 1 => last.1 = last.1.max(r),
                _ => out.push((l, r)),
            }
        }
        IntervalRep { intervals: out }
    }

    /// Representation of a set of positions.
    pub fn from_positions(pos: impl IntoIterator<Item = u32>) -> Self {
        IntervalRep::from_intervals(pos.into_iter().map(|p| (p, p)).collect())
    }

    /// Union of two representations.
    pub fn union(&self, other: &IntervalRep) -> IntervalRep {
        let mut v = self.intervals.clone();
        v.extend_from_slice(&other.intervals);
        IntervalRep::from_intervals(v)
    }

    /// True when position `p` is in the set.
    pub fn contains(&self, p: u32) -> bool {
        let i = self.intervals.partition_point(|iv| iv.1 < p);
        i < self.intervals.len() && self.intervals[i].0 <= p
    }

    /// True when every position of `[l, r]` is in the set (vacuous for
    /// `l > r`).
    pub fn covers(&self, l: u32, r: u32) -> bool {
        if l > r {
            return true;
        }
        let i = self.intervals.partition_point(|iv| iv.1 < l);
        i < self.intervals.len() && self.intervals[i].0 <= l && self.intervals[i].1 >= r
    }

    /// Number of positions in the set.
    pub fn count(&self) -> u64 {
        self.intervals.iter().map(|&(l, r)| (r - l) as u64 + 1).sum()
    }

    /// All positions, ascending.
    pub fn positions(&self) -> Vec<u32> {
        self.intervals.iter().flat_map(|&(l, r)| l..=r).collect()
    }

    /// True when the intervals are sorted, disjoint and maximal.
    pub fn is_normalized(&self) -> bool {
        self.intervals.iter().all(|&(l, r)| l <= r)
            && self.intervals.windows(2).all(|w| w[0].1 as u64 + 1 < w[1].0 as u64)
    }
}

/// Extracts `(a, b, class)` from a segment shape validated against `table`.
pub(crate) fn segment_parts(s: &Shape, index: usize, table: &SlopeTable) -> Result<(Point, Point, u32)> {
    match s {
        Shape::Segment { a, b, slope_class } => {
            s.validate(index, Some(table))?;
            Ok((*a, *b, *slope_class))
        }
        other => Err(GeoError::InvalidShape {
            index,
            reason: format!("expected a segment, got {}", other.kind_name()),
        }),
    }
}

/// Segments grouped by slope class, searchable by any query segment.
#[derive(Clone, Debug)]
struct ClassSets {
    sets: Vec<ParallelSet>,
}

impl ClassSets {
    fn new(segs: &[(Seg, u32)], table: &SlopeTable, eps: f64) -> Self {
        let qd: Vec<(u32, Point)> = table
            .directions()
            .iter()
            .enumerate()
            .map(|(i, &d)| (i as u32 + 1, d))
            .collect();
        let mut sets = Vec::new();
        for (i, &d) in table.directions().iter().enumerate() {
            let objs: Vec<Seg> = segs.iter().filter(|(_, c)| *c == i as u32 + 1).map(|(s, _)| *s).collect();
            if !objs.is_empty() {
                sets.push(ParallelSet::new(objs, d, &qd, eps));
            }
        }
        ClassSets { sets }
    }

    fn hit(&self, a: Point, b: Point, class: u32) -> bool {
        self.sets.iter().any(|s| s.find(a, b, class).is_some())
    }
}

/// Objects (segments) each carrying a set of positions, answering which
/// positions are covered by the objects a query segment intersects.
///
/// Each interval of an object is a separate copy stored at the canonical
/// nodes of a segment tree over positions; every node keeps a searchable
/// set of the copies stored at it and of the copies stored anywhere in its
/// subtree.
#[derive(Clone, Debug)]
pub struct CoverIndex {
    positions: u32,
    size: usize,
    cover: Vec<Option<ClassSets>>,
    touch: Vec<Option<ClassSets>>,
    copies: usize,
}

impl CoverIndex {
    /// Builds the index over positions `0..positions` for segment objects
    /// and their position sets.
    pub fn new(
        objects: &[(Shape, IntervalRep)],
        positions: u32,
        table: &SlopeTable,
        cfg: &PredicateConfig,
    ) -> Result<Self> {
        let size = (positions as usize).next_power_of_two().max(1);
        let mut cover_lists: Vec<Vec<(Seg, u32)>> = vec![Vec::new(); 2 * size];
        let mut touch_lists: Vec<Vec<(Seg, u32)>> = vec![Vec::new(); 2 * size];
        let mut stamp = vec![usize::MAX; 2 * size];
        let mut copies = 0;
        for (k, (shape, rep)) in objects.iter().enumerate() {
            let (a, b, class) = segment_parts(shape, k, table)?;
            let seg = Seg { a, b, id: k as u32 };
            for &(l, r) in &rep.intervals {
                if r >= positions {
                    return Err(GeoError::Parameter(format!(
                        "object {k} carries position {r} outside 0..{positions}"
                    )));
                }
                copies += 1;
                let (mut lo, mut hi) = (l as usize + size, r as usize + size + 1);
                let mut canon = Vec::new();
                while lo < hi {
                    if lo & 1 == 1 {
                        canon.push(lo);
                        lo += 1;
                    }
                    if hi & 1 == 1 {
                        hi -= 1;
                        canon.push(hi);
                    }
                    lo >>= 1;
                    hi >>= 1;
                }
                for node in canon {
                    cover_lists[node].push((seg, class));
                    let mut p = node;
                    while p >= 1 {
                        if stamp[p] != k {
                            stamp[p] = k;
                            touch_lists[p].push((seg, class));
                        }
                        p >>= 1;
                    }
                }
            }
        }
        let eps = cfg.epsilon;
        let build = |l: Vec<(Seg, u32)>| (!l.is_empty()).then(|| ClassSets::new(&l, table, eps));
        Ok(CoverIndex {
            positions,
            size,
            cover: cover_lists.into_iter().map(build).collect(),
            touch: touch_lists.into_iter().map(build).collect(),
            copies,
        })
    }

    /// Number of positions.
    pub fn positions(&self) -> u32 {
        self.positions
    }

    /// Number of stored interval copies.
    pub fn copies(&self) -> usize {
        self.copies
    }

    fn node_range(&self, node: usize) -> (u32, u32) {
        let depth = usize::BITS - 1 - node.leading_zeros();
        let span = self.size >> depth;
        let lo = (node - (1 << depth)) * span;
        let hi = (lo + span - 1).min(self.positions as usize - 1);
        (lo as u32, hi as u32)
    }

    fn hits(list: &[Option<ClassSets>], node: usize, q: (Point, Point, u32)) -> bool {
        list[node].as_ref().is_some_and(|s| s.hit(q.0, q.1, q.2))
    }

    fn search(&self, node: usize, q: (Point, Point, u32), incoming: &IntervalRep, out: &mut Vec<(u32, u32)>) {
        let (lo, hi) = self.node_range(node);
        if incoming.covers(lo, hi) {
            return;
        }
        if Self::hits(&self.cover, node, q) {
            out.push((lo, hi));
            return;
        }
        if node >= self.size {
            return;
        }
        for child in [2 * node, 2 * node + 1] {
            if (self.node_range_start(child) as u64) < self.positions as u64 && Self::hits(&self.touch, child, q) {
                self.search(child, q, incoming, out);
            }
        }
    }

    fn node_range_start(&self, node: usize) -> usize {
        let depth = usize::BITS - 1 - node.leading_zeros();
        (node - (1 << depth)) * (self.size >> depth)
    }

    fn covered(&self, node: usize, q: (Point, Point, u32), l: u32, r: u32) -> bool {
        if Self::hits(&self.cover, node, q) {
            return true;
        }
        if node >= self.size {
            return false;
        }
        for child in [2 * node, 2 * node + 1] {
            if self.node_range_start(child) >= self.positions as usize {
                continue;
            }
            let (cl, ch) = self.node_range(child);
            if ch < l || cl > r {
                continue;
            }
            if !Self::hits(&self.touch, child, q) || !self.covered(child, q, l, r) {
                return false;
            }
        }
        true
    }
}

fn query_parts(q: &Shape) -> Result<(Point, Point, u32)> {
    match q {
        Shape::Segment { a, b, slope_class } => Ok((*a, *b, *slope_class)),
        other => Err(GeoError::UnsupportedPair("segment", other.kind_name())),
    }
}

/// True when every position of the inclusive interval `i` is covered by the
/// position sets of the objects intersecting `q`. An empty interval
/// (`i.0 > i.1`) is vacuously covered.
pub fn covers_query(ci: &CoverIndex, q: &Shape, i: (u32, u32)) -> Result<bool> {
    let q = query_parts(q)?;
    if i.0 > i.1 {
        return Ok(true);
    }
    if i.1 >= ci.positions {
        return Err(GeoError::Parameter(format!(
            "interval end {} outside 0..{}",
            i.1, ci.positions
        )));
    }
    Ok(ci.covered(1, q, i.0, i.1))
}

/// Union of `incoming` with the position sets of all objects intersecting
/// `q`, found by descending the position tree and stopping at nodes that
/// are fully covered or avoided.
pub fn interval_search(ci: &CoverIndex, q: &Shape, incoming: &IntervalRep) -> Result<IntervalRep> {
    let q = query_parts(q)?;
    let mut out = incoming.intervals.clone();
    if ci.positions > 0 {
        ci.search(1, q, incoming, &mut out);
    }
    Ok(IntervalRep::from_intervals(out))
}

/// Colored segments of one slope class, answering whether a query segment
/// meets every color.
#[derive(Clone, Debug)]
pub struct RainbowIndex {
    class: u32,
    colors: Vec<u32>,
    sets: Vec<ParallelSet>,
}

impl RainbowIndex {
    /// Indexes colored segments of a single slope class. Two indexed
    /// segments lying on a common line and overlapping are rejected as
    /// degenerate input.
    pub fn new(segments: &[(Shape, u32)], table: &SlopeTable, cfg: &PredicateConfig) -> Result<Self> {
        let mut parts = Vec::with_capacity(segments.len());
        for (k, (s, color)) in segments.iter().enumerate() {
            let (a, b, class) = segment_parts(s, k, table)?;
            parts.push((Seg { a, b, id: k as u32 }, class, *color));
        }
        let class = parts.first().map_or(1, |p| p.1);
        if parts.iter().any(|p| p.1 != class) {
            return Err(GeoError::Parameter("indexed segments must share one slope class".into()));
        }
        let dir = table
            .direction(class)
            .ok_or_else(|| GeoError::Parameter("slope class not in table".into()))?;
        let qd: Vec<(u32, Point)> = table
            .directions()
            .iter()
            .enumerate()
            .map(|(i, &d)| (i as u32 + 1, d))
            .collect();
        let all = ParallelSet::new(parts.iter().map(|p| p.0).collect(), dir, &[], cfg.epsilon);
        if let Some((i, j)) = all.collinear_overlap() {
            return Err(GeoError::DegenerateInput(format!(
                "segments {i} and {j} are collinear and overlap"
            )));
        }
        let mut colors: Vec<u32> = parts.iter().map(|p| p.2).collect();
        colors.sort_unstable();
        colors.dedup();
        let sets = colors
            .iter()
            .map(|&c| {
                let objs = parts.iter().filter(|p| p.2 == c).map(|p| p.0).collect();
                ParallelSet::new(objs, dir, &qd, cfg.epsilon)
            })
            .collect();
        Ok(RainbowIndex { class, colors, sets })
    }

    /// Distinct colors present, ascending.
    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    /// Slope class of the indexed segments.
    pub fn class(&self) -> u32 {
        self.class
    }
}

/// True when `query` intersects at least one indexed segment of every color
/// present in the index. Queries parallel to the index are answered along
/// their common line.
pub fn ris_all_colors(index: &RainbowIndex, query: &Shape) -> Result<bool> {
    let (a, b, class) = query_parts(query)?;
    Ok(index.sets.iter().all(|s| s.find(a, b, class).is_some()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(a: (f64, f64), b: (f64, f64)) -> Shape {
        Shape::segment(Point::new(a.0, a.1), Point::new(b.0, b.1), &SlopeTable::default()).unwrap()
    }

    #[test]
    fn rainbow_examples() {
        let t = SlopeTable::default();
        let cfg = PredicateConfig::default();
        let ix = RainbowIndex::new(&[(seg((0.0, 0.0), (1.0, 0.0)), 1), (seg((0.0, 1.0), (1.0, 1.0)), 2)], &t, &cfg)
            .unwrap();
        assert!(ris_all_colors(&ix, &seg((0.5, -1.0), (0.5, 2.0))).unwrap());
        assert!(!ris_all_colors(&ix, &seg((0.5, -1.0), (0.5, 0.5))).unwrap());
        let bad = RainbowIndex::new(&[(seg((0.0, 0.0), (1.0, 0.0)), 1), (seg((0.5, 0.0), (2.0, 0.0)), 2)], &t, &cfg);
        assert!(matches!(bad, Err(GeoError::DegenerateInput(_))));
    }

    #[test]
    fn cover_examples() {
        let t = SlopeTable::default();
        let cfg = PredicateConfig::default();
        let objs = vec![
            (seg((0.0, 0.0), (2.0, 0.0)), IntervalRep::from_intervals(vec![(1, 3)])),
            (seg((0.0, 1.0), (2.0, 1.0)), IntervalRep::from_intervals(vec![(4, 6)])),
            (seg((5.0, 0.0), (6.0, 0.0)), IntervalRep::from_intervals(vec![(7, 7)])),
        ];
        let ci = CoverIndex::new(&objs, 10, &t, &cfg).unwrap();
        let q = seg((1.0, -1.0), (1.0, 2.0));
        assert!(covers_query(&ci, &q, (1, 6)).unwrap());
        assert!(!covers_query(&ci, &q, (1, 7)).unwrap());
        assert!(covers_query(&ci, &q, (5, 4)).unwrap());
        let got = interval_search(&ci, &q, &IntervalRep::from_intervals(vec![(8, 9)])).unwrap();
        assert_eq!(got.intervals, vec![(1, 6), (8, 9)]);
        let none = interval_search(&ci, &seg((9.0, 5.0), (9.0, 6.0)), &IntervalRep::empty()).unwrap();
        assert!(none.intervals.is_empty());
    }

    #[test]
    fn interval_rep_is_maximal() {
        let r = IntervalRep::from_intervals(vec![(4, 6), (1, 3), (9, 9), (8, 8)]);
        assert_eq!(r.intervals, vec![(1, 6), (8, 9)]);
        assert!(r.is_normalized());
        assert!(r.covers(2, 5) && !r.covers(5, 8) && r.contains(9) && !r.contains(7));
    }
}
