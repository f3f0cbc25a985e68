//! Set systems of graph balls and searches for shattered subsets.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{GeoError, Result};
use crate::geometry::Shape;
use crate::oracle::{IntersectionGraph, UNREACHABLE};
use crate::segments::{rainbow_ball_reference, ColorSequence};

/// Largest subset [`is_shattered`] enumerates traces for.
pub const MAX_SHATTER_SIZE: usize = 20;

/// Largest graph the ball systems are enumerated for.
pub const MAX_SYSTEM_VERTICES: usize = 2000;

/// Seed of [`search_shattered`].
pub const DEFAULT_SEARCH_SEED: u64 = 0x5eed_5a7;

/// Where the members of a set system come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Closed balls `N^r[v]` of a graph.
    NeighborhoodBalls,
    /// Rainbow balls `B_S(v)` for the given color sequence.
    RainbowBalls(Vec<u32>),
    /// Sets supplied by the caller.
    Explicit,
}

/// A deduplicated family of subsets of `0..ground_size`, stored as bitsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSystem {
    ground_size: usize,
    family: Vec<Vec<u64>>,
    provenance: Provenance,
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

fn bit(set: &[u64], x: usize) -> bool {
    set[x / 64] >> (x % 64) & 1 == 1
}

impl SetSystem {
    /// Builds a system from member element lists; duplicates are dropped.
    pub fn new(ground_size: usize, members: impl IntoIterator<Item = Vec<usize>>, provenance: Provenance) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut family = Vec::new();
        for m in members {
            let mut b = vec![0u64; words(ground_size)];
            for x in m {
                if x >= ground_size {
                    return Err(GeoError::Parameter(format!("element {x} outside ground set of size {ground_size}")));
                }
                b[x / 64] |= 1 << (x % 64);
            }
            if seen.insert(b.clone()) {
                family.push(b);
            }
        }
        Ok(SetSystem {
            ground_size,
            family,
            provenance,
        })
    }

    /// Size of the ground set.
    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    /// Number of distinct members.
    pub fn len(&self) -> usize {
        self.family.len()
    }

    /// True when the family has no member.
    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    /// Origin of the members.
    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Elements of member `i`, ascending.
    pub fn member(&self, i: usize) -> Vec<usize> {
        (0..self.ground_size).filter(|&x| bit(&self.family[i], x)).collect()
    }

    /// All members as sorted element lists.
    pub fn members(&self) -> Vec<Vec<usize>> {
        (0..self.len()).map(|i| self.member(i)).collect()
    }

    /// For every element, the bitset of members containing it.
    fn columns(&self) -> Vec<Vec<u64>> {
        let m = self.family.len();
        let mut cols = vec![vec![0u64; words(m)]; self.ground_size];
        for (j, set) in self.family.iter().enumerate() {
            for (x, col) in cols.iter_mut().enumerate() {
                if bit(set, x) {
                    col[j / 64] |= 1 << (j % 64);
                }
            }
        }
        cols
    }
}

/// True when every subset of `x` is the trace `X ∩ F` of some member `F`.
/// Repeated elements count once; the empty set is always shattered.
pub fn is_shattered(x: &[usize], sys: &SetSystem) -> Result<bool> {
    let mut x = x.to_vec();
    x.sort_unstable();
    x.dedup();
    if x.len() > MAX_SHATTER_SIZE {
        return Err(GeoError::Size(format!(
            "cannot enumerate traces of {} elements (limit {MAX_SHATTER_SIZE})",
            x.len()
        )));
    }
    if let Some(&e) = x.iter().find(|&&e| e >= sys.ground_size) {
        return Err(GeoError::Parameter(format!("element {e} outside the ground set")));
    }
    if x.is_empty() {
        return Ok(true);
    }
    let need = 1usize << x.len();
    if sys.family.len() < need {
        return Ok(false);
    }
    let mut seen = vec![false; need];
    let mut count = 0;
    for set in &sys.family {
        let t = x.iter().enumerate().fold(0usize, |t, (i, &e)| t | (usize::from(bit(set, e)) << i));
        if !seen[t] {
            seen[t] = true;
            count += 1;
            if count == need {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Result of a shattered-set search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShatterReport {
    /// Largest shattered subset found, ascending.
    pub max_witness: Vec<usize>,
    /// Its size.
    pub size: usize,
    /// True when the search provably found the largest shattered subset of
    /// size at most `k`.
    pub exhaustive: bool,
    /// Extension checks performed.
    pub checks: u64,
    /// Seed of the randomized phase.
    pub seed: u64,
}

/// Search state: a shattered set and the members grouped by their trace on
/// it (one bitset over members per trace).
struct Searcher<'a> {
    cols: &'a [Vec<u64>],
    k: usize,
    budget: u64,
    checks: u64,
    best: Vec<usize>,
}

impl Searcher<'_> {
    /// Splits each class by element `e`; `None` when some trace cannot be
    /// extended both ways (so `X ∪ {e}` is not shattered).
    fn extend(&mut self, classes: &[Vec<u64>], e: usize) -> Option<Vec<Vec<u64>>> {
        self.checks += 1;
        let col = &self.cols[e];
        let mut out = Vec::with_capacity(2 * classes.len());
        for c in classes {
            let with: Vec<u64> = c.iter().zip(col).map(|(a, b)| a & b).collect();
            let without: Vec<u64> = c.iter().zip(col).map(|(a, b)| a & !b).collect();
            if with.iter().all(|&w| w == 0) || without.iter().all(|&w| w == 0) {
                return None;
            }
            out.push(without);
            out.push(with);
        }
        Some(out)
    }

    /// Depth-first enumeration of shattered sets in increasing element
    /// order; returns false when the budget ran out.
    fn dfs(&mut self, x: &mut Vec<usize>, classes: &[Vec<u64>], start: usize) -> bool {
        if x.len() > self.best.len() {
            self.best = x.clone();
        }
        if x.len() == self.k {
            return true;
        }
        for e in start..self.cols.len() {
            if self.checks >= self.budget {
                return false;
            }
            if let Some(next) = self.extend(classes, e) {
                x.push(e);
                let done = self.dfs(x, &next, e + 1);
                x.pop();
                if !done {
                    return false;
                }
            }
        }
        true
    }
}

/// [`search_shattered_seeded`] with [`DEFAULT_SEARCH_SEED`].
pub fn search_shattered(sys: &SetSystem, k: usize, budget: u64) -> Result<ShatterReport> {
    search_shattered_seeded(sys, k, budget, DEFAULT_SEARCH_SEED)
}

/// Looks for the largest shattered subset of size at most `k`.
///
/// Since subsets of shattered sets are shattered, all shattered sets are
/// enumerated by extending shattered sets one element at a time. When this
/// finishes within `budget` extension checks the result is exhaustive;
/// otherwise random greedy extensions (seeded by `seed`) continue the search
/// with another `budget` checks and the result is not exhaustive. Every
/// reported witness is re-verified with [`is_shattered`].
pub fn search_shattered_seeded(sys: &SetSystem, k: usize, budget: u64, seed: u64) -> Result<ShatterReport> {
    if k > MAX_SHATTER_SIZE {
        return Err(GeoError::Size(format!("k = {k} exceeds {MAX_SHATTER_SIZE}")));
    }
    let cols = sys.columns();
    let m = sys.family.len();
    let mut s = Searcher {
        cols: &cols,
        k,
        budget,
        checks: 0,
        best: Vec::new(),
    };
    let exhaustive = if m == 0 {
        // No member: not even the empty trace of a nonempty set is realized.
        true
    } else {
        let mut all = vec![u64::MAX; words(m)];
        if m % 64 != 0 {
            *all.last_mut().unwrap() = (1u64 << (m % 64)) - 1;
        }
        let root = vec![all];
        let complete = s.dfs(&mut Vec::new(), &root, 0);
        if !complete {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut order: Vec<usize> = (0..sys.ground_size).collect();
            s.budget = s.checks + budget;
            while s.checks < s.budget && s.best.len() < k {
                order.shuffle(&mut rng);
                let mut x = Vec::new();
                let mut classes = root.clone();
                for &e in &order {
                    if x.len() == k || s.checks >= s.budget {
                        break;
                    }
                    if let Some(next) = s.extend(&classes, e) {
                        x.push(e);
                        classes = next;
                    }
                }
                if x.len() > s.best.len() {
                    x.sort_unstable();
                    s.best = x;
                }
            }
        }
        complete
    };
    let mut witness = s.best;
    witness.sort_unstable();
    if !is_shattered(&witness, sys)? {
        return Err(GeoError::Validation(format!("reported witness {witness:?} is not shattered")));
    }
    Ok(ShatterReport {
        size: witness.len(),
        max_witness: witness,
        exhaustive,
        checks: s.checks,
        seed,
    })
}

fn check_size(g: &IntersectionGraph) -> Result<()> {
    if g.n > MAX_SYSTEM_VERTICES {
        return Err(GeoError::Size(format!(
            "graph has {} vertices (limit {MAX_SYSTEM_VERTICES})",
            g.n
        )));
    }
    Ok(())
}

/// The system of closed balls `N^r[v]` for every vertex and every radius
/// `0 ≤ r ≤ n` (balls stop changing at the eccentricity).
pub fn neighborhood_system(g: &IntersectionGraph) -> Result<SetSystem> {
    check_size(g)?;
    let mut members = Vec::new();
    for v in 0..g.n {
        let dist = g.bfs(v);
        let ecc = dist.iter().filter(|&&d| d != UNREACHABLE).max().copied().unwrap_or(0);
        for r in 0..=ecc {
            members.push((0..g.n).filter(|&u| dist[u] <= r).collect());
        }
    }
    SetSystem::new(g.n, members, Provenance::NeighborhoodBalls)
}

/// The system `{B_S(v) : v}` of rainbow balls, colors being the slope
/// classes of the graph's segments.
pub fn rainbow_system(g: &IntersectionGraph, s: &ColorSequence) -> Result<SetSystem> {
    let colors = g
        .shapes
        .iter()
        .enumerate()
        .map(|(i, sh)| match sh {
            Shape::Segment { slope_class, .. } => Ok(*slope_class),
            other => Err(GeoError::InvalidShape {
                index: i,
                reason: format!("rainbow balls need segments, got {}", other.kind_name()),
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    rainbow_system_with_colors(g, &colors, s)
}

/// [`rainbow_system`] with explicit vertex colors.
pub fn rainbow_system_with_colors(g: &IntersectionGraph, colors: &[u32], s: &ColorSequence) -> Result<SetSystem> {
    check_size(g)?;
    if colors.len() != g.n {
        return Err(GeoError::Parameter("one color per vertex required".into()));
    }
    let members = (0..g.n).map(|v| rainbow_ball_reference(g, colors, v, s.colors()));
    SetSystem::new(g.n, members, Provenance::RainbowBalls(s.colors().to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(u32, u32)]) -> IntersectionGraph {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        IntersectionGraph::from_adjacency(adj, Vec::new())
    }

    #[test]
    fn examples() {
        let path = neighborhood_system(&graph(2, &[(0, 1)])).unwrap();
        assert!(is_shattered(&[0], &path).unwrap());
        assert!(is_shattered(&[], &path).unwrap());
        let k3 = neighborhood_system(&graph(3, &[(0, 1), (1, 2), (0, 2)])).unwrap();
        assert_eq!(k3.len(), 4);
        assert!(!is_shattered(&[0, 1, 2], &k3).unwrap());
        let r = search_shattered(&k3, 3, 1000).unwrap();
        assert_eq!((r.size, r.exhaustive), (2, true));
        let one = neighborhood_system(&graph(1, &[])).unwrap();
        let r = search_shattered(&one, 3, 1000).unwrap();
        assert_eq!((r.size, r.exhaustive), (0, true));
        let edgeless = neighborhood_system(&graph(3, &[])).unwrap();
        assert_eq!(edgeless.members(), vec![vec![0], vec![1], vec![2]]);
        assert!(matches!(is_shattered(&(0..21).collect::<Vec<_>>(), &edgeless), Err(GeoError::Size(_))));
    }
}
