//! Explicit intersection graphs and brute-force BFS diameter.
//!
//! This module is the ground truth every algorithm is tested against: it
//! builds the full adjacency structure with the shared predicates and runs one
//! BFS per source vertex.

use std::collections::{HashMap, VecDeque};

use crate::error::{GeoError, Result};
use crate::geometry::{intersects, PredicateConfig, Shape};

/// Marker for "unreachable" in BFS distance arrays.
pub const UNREACHABLE: u32 = u32::MAX;

/// An intersection graph with explicit, sorted adjacency lists.
#[derive(Clone, Debug)]
pub struct IntersectionGraph {
    /// Vertex count.
    pub n: usize,
    /// Per-vertex neighbor lists, sorted ascending, without self-loops.
    pub adjacency: Vec<Vec<u32>>,
    /// The shapes the graph was built from, indexed like the vertices.
    pub shapes: Vec<Shape>,
}

/// Value of a diameter: a hop count or "infinite" for disconnected graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiameterValue {
    /// Finite diameter.
    Finite(u32),
    /// The graph is disconnected.
    Infinite,
}

/// Diameter together with a pair of vertices attaining it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiameterResult {
    /// The diameter.
    pub value: DiameterValue,
    /// A pair `(u, v)` at distance `value` (for an infinite value: a pair in
    /// different components). `None` only for the empty graph.
    pub witness_pair: Option<(usize, usize)>,
}

impl IntersectionGraph {
    /// Builds a graph directly from adjacency lists (used by tests and by
    /// algorithms that already know the edges). Lists are sorted and
    /// deduplicated; the caller guarantees symmetry.
    pub fn from_adjacency(mut adjacency: Vec<Vec<u32>>, shapes: Vec<Shape>) -> Self {
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        IntersectionGraph {
            n: adjacency.len(),
            adjacency,
            shapes,
        }
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// True when `u` and `v` are adjacent.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&(v as u32)).is_ok()
    }

    /// BFS hop distances from `src`; unreachable vertices get [`UNREACHABLE`].
    pub fn bfs(&self, src: usize) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.n];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            for &w in &self.adjacency[u] {
                let w = w as usize;
                if dist[w] == UNREACHABLE {
                    dist[w] = du + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// The closed ball `N^r[v]` as a sorted vertex list.
    pub fn ball(&self, v: usize, r: u32) -> Vec<usize> {
        self.bfs(v)
            .iter()
            .enumerate()
            .filter(|(_, &d)| d <= r)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Builds the intersection graph of `shapes`.
///
/// Unit disks and unit squares are bucketed in a uniform grid (cell side
/// `2 + 2ε` for disks, `1 + 2ε` for squares) so only pairs in neighboring
/// cells are tested; the result equals all-pairs testing. Other kinds are
/// tested pairwise after a bounding-box filter.
pub fn build_graph(shapes: &[Shape], cfg: &PredicateConfig) -> Result<IntersectionGraph> {
    if shapes.is_empty() {
        return Err(GeoError::Parameter("build_graph needs at least one shape".into()));
    }
    let cell = if shapes.iter().all(|s| matches!(s, Shape::UnitDisk { .. })) {
        Some(2.0 + 2.0 * cfg.epsilon)
    } else if shapes.iter().all(|s| matches!(s, Shape::UnitSquare { .. })) {
        Some(1.0 + 2.0 * cfg.epsilon)
    } else {
        None
    };
    let n = shapes.len();
    let mut adjacency = vec![Vec::new(); n];
    match cell {
        Some(side) => {
            let key = |s: &Shape| {
                let c = s.points()[0];
                ((c.x / side).floor() as i64, (c.y / side).floor() as i64)
            };
            let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
            for (i, s) in shapes.iter().enumerate() {
                grid.entry(key(s)).or_default().push(i);
            }
            for (i, s) in shapes.iter().enumerate() {
                let (cx, cy) = key(s);
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        if let Some(bucket) = grid.get(&(cx + dx, cy + dy)) {
                            for &j in bucket {
                                if j > i && intersects(s, &shapes[j], cfg)? {
                                    adjacency[i].push(j as u32);
                                    adjacency[j].push(i as u32);
                                }
                            }
                        }
                    }
                }
            }
        }
        None => {
            let boxes: Vec<_> = shapes.iter().map(Shape::bbox).collect();
            let eps = cfg.epsilon;
            for i in 0..n {
                for j in i + 1..n {
                    let (la, ha) = boxes[i];
                    let (lb, hb) = boxes[j];
                    if la.x > hb.x + eps || lb.x > ha.x + eps || la.y > hb.y + eps || lb.y > ha.y + eps
                    {
                        // Still surface unsupported pairs instead of skipping them.
                        if shapes[i].kind_name() != shapes[j].kind_name() {
                            intersects(&shapes[i], &shapes[j], cfg)?;
                        }
                        continue;
                    }
                    if intersects(&shapes[i], &shapes[j], cfg)? {
                        adjacency[i].push(j as u32);
                        adjacency[j].push(i as u32);
                    }
                }
            }
        }
    }
    Ok(IntersectionGraph::from_adjacency(adjacency, shapes.to_vec()))
}

/// Builds the intersection graph by testing every pair (reference for the
/// grid-pruned builder).
pub fn build_graph_all_pairs(shapes: &[Shape], cfg: &PredicateConfig) -> Result<IntersectionGraph> {
    if shapes.is_empty() {
        return Err(GeoError::Parameter("build_graph needs at least one shape".into()));
    }
    let n = shapes.len();
    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if intersects(&shapes[i], &shapes[j], cfg)? {
                adjacency[i].push(j as u32);
                adjacency[j].push(i as u32);
            }
        }
    }
    Ok(IntersectionGraph::from_adjacency(adjacency, shapes.to_vec()))
}

/// Exact diameter by one BFS per vertex, sources in input order.
///
/// The witness is the first pair (by source, then target index) attaining the
/// maximum; for disconnected graphs it is the first unreachable pair found.
pub fn exact_diameter(g: &IntersectionGraph) -> DiameterResult {
    if g.n == 0 {
        return DiameterResult {
            value: DiameterValue::Finite(0),
            witness_pair: None,
        };
    }
    let mut best = 0u32;
    let mut witness = (0usize, 0usize);
    for u in 0..g.n {
        let dist = g.bfs(u);
        for (v, &d) in dist.iter().enumerate() {
            if d == UNREACHABLE {
                return DiameterResult {
                    value: DiameterValue::Infinite,
                    witness_pair: Some((u, v)),
                };
            }
            if d > best {
                best = d;
                witness = (u, v);
            }
        }
    }
    DiameterResult {
        value: DiameterValue::Finite(best),
        witness_pair: Some(witness),
    }
}

/// Decides `diameter ≤ delta`, stopping at the first eccentricity above
/// `delta`. Disconnected graphs are never within any bound.
pub fn diameter_at_most(g: &IntersectionGraph, delta: u32) -> bool {
    for u in 0..g.n {
        let dist = g.bfs(u);
        if dist.iter().any(|&d| d == UNREACHABLE || d > delta) {
            return false;
        }
    }
    true
}

/// All-pairs shortest hop distances by Floyd–Warshall (test reference).
pub fn floyd_warshall(g: &IntersectionGraph) -> Vec<Vec<u32>> {
    let n = g.n;
    let mut d = vec![vec![UNREACHABLE; n]; n];
    for u in 0..n {
        d[u][u] = 0;
        for &v in &g.adjacency[u] {
            d[u][v as usize] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i][k];
            if dik == UNREACHABLE {
                continue;
            }
            for j in 0..n {
                let dkj = d[k][j];
                if dkj != UNREACHABLE && dik + dkj < d[i][j] {
                    d[i][j] = dik + dkj;
                }
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn disks(c: &[(f64, f64)]) -> Vec<Shape> {
        c.iter()
            .map(|&(x, y)| Shape::UnitDisk {
                center: Point::new(x, y),
            })
            .collect()
    }

    #[test]
    fn path_of_three_disks() {
        let g = build_graph(&disks(&[(0.0, 0.0), (1.9, 0.0), (3.8, 0.0)]), &PredicateConfig::default())
            .unwrap();
        assert_eq!(g.adjacency, vec![vec![1], vec![0, 2], vec![1]]);
        let d = exact_diameter(&g);
        assert_eq!(d.value, DiameterValue::Finite(2));
        assert_eq!(d.witness_pair, Some((0, 2)));
        assert!(diameter_at_most(&g, 2));
        assert!(!diameter_at_most(&g, 1));
    }

    #[test]
    fn single_vertex() {
        let g = build_graph(&disks(&[(0.0, 0.0)]), &PredicateConfig::default()).unwrap();
        assert_eq!(g.n, 1);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(exact_diameter(&g).value, DiameterValue::Finite(0));
    }

    #[test]
    fn disconnected_is_infinite() {
        let g = build_graph(&disks(&[(0.0, 0.0), (10.0, 0.0)]), &PredicateConfig::default()).unwrap();
        assert_eq!(exact_diameter(&g).value, DiameterValue::Infinite);
        assert!(!diameter_at_most(&g, 100));
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(build_graph(&[], &PredicateConfig::default()).is_err());
    }
}
