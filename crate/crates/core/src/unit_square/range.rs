//! Offline L∞-ball range minimum / maximum between consecutive levels.
//!
//! Weights live on the points of one level; for every point of a query level
//! we need the best weight among data points within Chebyshev distance 1.
//! The queries are answered by an x-sweep with a sliding window whose
//! members are stored in a segment tree keyed by y-rank.

use crate::geometry::Point;

/// Per-level precomputation: x order and y ranks.
#[derive(Clone, Debug)]
pub(crate) struct LevelIndex {
    pub pts: Vec<Point>,
    /// Point ids sorted by x.
    order_x: Vec<u32>,
    /// y values sorted ascending.
    ys: Vec<f64>,
    /// Rank of each point among `ys` (ties broken by id).
    rank: Vec<u32>,
}

impl LevelIndex {
    pub fn new(pts: Vec<Point>) -> Self {
        let n = pts.len();
        let mut order_x: Vec<u32> = (0..n as u32).collect();
        order_x.sort_by(|&a, &b| pts[a as usize].x.total_cmp(&pts[b as usize].x));
        let mut order_y: Vec<u32> = (0..n as u32).collect();
        order_y.sort_by(|&a, &b| {
            pts[a as usize]
                .y
                .total_cmp(&pts[b as usize].y)
                .then(a.cmp(&b))
        });
        let mut rank = vec![0u32; n];
        for (r, &id) in order_y.iter().enumerate() {
            rank[id as usize] = r as u32;
        }
        let ys = order_y.iter().map(|&id| pts[id as usize].y).collect();
        LevelIndex {
            pts,
            order_x,
            ys,
            rank,
        }
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }
}

/// Idempotent combine operation of a windowed sweep.
pub(crate) trait Semilattice: Copy + PartialEq {
    /// Neutral element (an absent or ignored weight).
    const IDENTITY: Self;
    /// Combines two values.
    fn join(self, other: Self) -> Self;
}

/// Minimum over `f64` with `+∞` as identity.
#[derive(Clone, Copy, PartialEq)]
pub(crate) struct MinF64(pub f64);

impl Semilattice for MinF64 {
    const IDENTITY: Self = MinF64(f64::INFINITY);
    #[inline]
    fn join(self, other: Self) -> Self {
        MinF64(self.0.min(other.0))
    }
}

impl Semilattice for u64 {
    const IDENTITY: Self = 0;
    #[inline]
    fn join(self, other: Self) -> Self {
        self | other
    }
}

/// Iterative segment tree over rows of `k` values supporting row assignment
/// and componentwise range joins.
struct JoinTree<T> {
    size: usize,
    k: usize,
    t: Vec<T>,
}

impl<T: Semilattice> JoinTree<T> {
    fn new(n: usize, k: usize) -> Self {
        let size = n.next_power_of_two().max(1);
        JoinTree {
            size,
            k,
            t: vec![T::IDENTITY; 2 * size * k],
        }
    }

    fn set(&mut self, i: usize, v: Option<&[T]>) {
        let k = self.k;
        let mut p = i + self.size;
        match v {
            Some(v) => self.t[p * k..(p + 1) * k].copy_from_slice(v),
            None => self.t[p * k..(p + 1) * k].fill(T::IDENTITY),
        }
        while p > 1 {
            p >>= 1;
            let (lo, hi) = self.t.split_at_mut((2 * p) * k);
            let dst = &mut lo[p * k..(p + 1) * k];
            let (a, b) = hi[..2 * k].split_at(k);
            for ((d, x), y) in dst.iter_mut().zip(a).zip(b) {
                *d = x.join(*y);
            }
        }
    }

    /// Componentwise join over the half-open rank range `[l, r)`.
    fn query(&self, l: usize, r: usize, out: &mut [T]) {
        let k = self.k;
        let mut fold = |node: usize| {
            for (o, v) in out.iter_mut().zip(&self.t[node * k..(node + 1) * k]) {
                *o = o.join(*v);
            }
        };
        let (mut l, mut r) = (l + self.size, r + self.size);
        while l < r {
            if l & 1 == 1 {
                fold(l);
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                fold(r);
            }
            l >>= 1;
            r >>= 1;
        }
    }
}

/// For every point of `query`, the join of the `k`-wide weight rows of all
/// data points within L∞ distance 1 (closed). `weights` is row-major
/// `data.len() × k`; the result is row-major `query.len() × k`.
pub(crate) fn linf_join<T: Semilattice>(data: &LevelIndex, weights: &[T], k: usize, query: &LevelIndex) -> Vec<T> {
    let mut out = vec![T::IDENTITY; query.len() * k];
    if data.len() == 0 || k == 0 || weights.iter().all(|w| *w == T::IDENTITY) {
        return out;
    }
    let live = |id: usize| weights[id * k..(id + 1) * k].iter().any(|w| *w != T::IDENTITY);
    let mut tree = JoinTree::new(data.len(), k);
    let (mut add, mut del) = (0usize, 0usize);
    for &qid in &query.order_x {
        let q = query.pts[qid as usize];
        let (lo, hi) = (q.x - 1.0, q.x + 1.0);
        while add < data.order_x.len() && data.pts[data.order_x[add] as usize].x <= hi {
            let id = data.order_x[add] as usize;
            if live(id) {
                tree.set(data.rank[id] as usize, Some(&weights[id * k..(id + 1) * k]));
            }
            add += 1;
        }
        while del < add && data.pts[data.order_x[del] as usize].x < lo {
            let id = data.order_x[del] as usize;
            if live(id) {
                tree.set(data.rank[id] as usize, None);
            }
            del += 1;
        }
        let (ylo, yhi) = (q.y - 1.0, q.y + 1.0);
        let l = data.ys.partition_point(|&y| y < ylo);
        let r = data.ys.partition_point(|&y| y <= yhi);
        if l < r {
            let q = qid as usize;
            tree.query(l, r, &mut out[q * k..(q + 1) * k]);
        }
    }
    out
}

/// For every point of `query`, the minimum of `weights` (indexed like
/// `data.pts`) over data points within L∞ distance 1 (closed). Points with
/// weight `+∞` are ignored; an empty neighborhood yields `+∞`.
pub(crate) fn linf_min(data: &LevelIndex, weights: &[f64], query: &LevelIndex) -> Vec<f64> {
    linf_min_multi(data, weights, 1, query)
}

/// Batched [`linf_min`] over `k` weight columns: `weights` is row-major
/// `data.len() × k`, the result is row-major `query.len() × k`.
pub(crate) fn linf_min_multi(data: &LevelIndex, weights: &[f64], k: usize, query: &LevelIndex) -> Vec<f64> {
    let w: Vec<MinF64> = weights.iter().map(|&v| MinF64(v)).collect();
    linf_join(data, &w, k, query).into_iter().map(|v| v.0).collect()
}

/// Maximum counterpart of [`linf_min`]: points with weight `-∞` are ignored
/// and an empty neighborhood yields `-∞`.
pub(crate) fn linf_max(data: &LevelIndex, weights: &[f64], query: &LevelIndex) -> Vec<f64> {
    linf_max_multi(data, weights, 1, query)
}

/// Batched [`linf_max`], layout as in [`linf_min_multi`].
pub(crate) fn linf_max_multi(data: &LevelIndex, weights: &[f64], k: usize, query: &LevelIndex) -> Vec<f64> {
    let neg: Vec<f64> = weights.iter().map(|w| -w).collect();
    linf_min_multi(data, &neg, k, query).into_iter().map(|v| -v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = rng.gen_range(0..40);
            let k = rng.gen_range(0..40);
            let data: Vec<Point> = (0..m)
                .map(|_| Point::new(rng.gen_range(0.0..4.0), rng.gen_range(0.0..4.0)))
                .collect();
            let w: Vec<f64> = (0..m)
                .map(|_| {
                    if rng.gen_bool(0.2) {
                        f64::INFINITY
                    } else {
                        rng.gen_range(-5.0..5.0)
                    }
                })
                .collect();
            let qs: Vec<Point> = (0..k)
                .map(|_| Point::new(rng.gen_range(0.0..4.0), rng.gen_range(0.0..4.0)))
                .collect();
            let got = linf_min(&LevelIndex::new(data.clone()), &w, &LevelIndex::new(qs.clone()));
            for (qi, q) in qs.iter().enumerate() {
                let want = data
                    .iter()
                    .zip(&w)
                    .filter(|(d, _)| d.dist_inf(*q) <= 1.0)
                    .map(|(_, &v)| v)
                    .fold(f64::INFINITY, f64::min);
                assert_eq!(got[qi], want);
            }
        }
    }

    #[test]
    fn batched_matches_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let k = 5;
        let data: Vec<Point> = (0..60)
            .map(|_| Point::new(rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0)))
            .collect();
        let qs: Vec<Point> = (0..40)
            .map(|_| Point::new(rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0)))
            .collect();
        let w: Vec<f64> = (0..60 * k)
            .map(|_| if rng.gen_bool(0.5) { f64::INFINITY } else { rng.gen_range(-1.0..1.0) })
            .collect();
        let (di, qi) = (LevelIndex::new(data), LevelIndex::new(qs));
        let all = linf_min_multi(&di, &w, k, &qi);
        for c in 0..k {
            let col: Vec<f64> = (0..60).map(|i| w[i * k + c]).collect();
            let one = linf_min(&di, &col, &qi);
            for q in 0..40 {
                assert_eq!(all[q * k + c], one[q]);
            }
        }
    }
}
