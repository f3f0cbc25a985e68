//! Intersection searching among parallel segments.
//!
//! A set of segments sharing one slope class is queried with a segment of
//! any class. For a query of a different class the plane is expressed in
//! the affine basis of the two directions, where indexed segments become
//! horizontal `[α₁, α₂] × {β}` and the query vertical `{α} × [β₁, β₂]`;
//! intersection is then the box condition `β ∈ [β₁, β₂] ∧ α₁ ≤ α ≤ α₂`,
//! answered by a segment tree over β whose nodes keep the α₁-sorted objects
//! with prefix maxima of α₂. Queries of the same class reduce to overlap
//! tests along a shared line. The structural search uses a small slack and
//! every candidate is confirmed with the exact closed predicate.

use crate::geometry::{segments_intersect, Point};

/// Sets this small are scanned with the exact predicate instead of being
/// indexed.
const SCAN_LIMIT: usize = 12;

/// A stored segment: endpoints and caller-chosen identifier.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Seg {
    pub a: Point,
    pub b: Point,
    pub id: u32,
}

/// Objects of a single slope class, indexed for queries of one other class.
#[derive(Clone, Debug)]
struct CrossIndex {
    /// Query direction this index is built for.
    qdir: Point,
    /// Object direction.
    odir: Point,
    det: f64,
    slack: f64,
    /// Objects sorted by β.
    betas: Vec<f64>,
    /// Merge-sort tree over β order: level `ℓ` holds blocks of `2^ℓ`
    /// consecutive rows, each sorted by α₁, as `(α₁, object)`.
    levels: Vec<Vec<(f64, u32)>>,
    /// Per level and block prefix, the object with the largest α₂.
    best: Vec<Vec<u32>>,
    /// `(α₁, α₂)` per object.
    alpha: Vec<(f64, f64)>,
}

impl CrossIndex {
    fn coords(&self, p: Point) -> (f64, f64) {
        // p = α·odir + β·qdir
        (p.cross(self.qdir) / self.det, self.odir.cross(p) / self.det)
    }

    fn new(objs: &[Seg], odir: Point, qdir: Point, eps: f64) -> Self {
        let det = odir.cross(qdir);
        let slack = 4.0 * eps * (odir.norm() + qdir.norm()) / det.abs() + 1e-12;
        let mut ix = CrossIndex {
            qdir,
            odir,
            det,
            slack,
            betas: Vec::new(),
            levels: Vec::new(),
            best: Vec::new(),
            alpha: Vec::new(),
        };
        let mut rows: Vec<(f64, u32)> = Vec::with_capacity(objs.len());
        ix.alpha = objs
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let (a1, b1) = ix.coords(s.a);
                let (a2, b2) = ix.coords(s.b);
                rows.push((0.5 * (b1 + b2), k as u32));
                (a1.min(a2), a1.max(a2))
            })
            .collect();
        rows.sort_by(|x, y| x.0.total_cmp(&y.0));
        let n = rows.len();
        ix.betas = rows.iter().map(|r| r.0).collect();
        let mut level: Vec<(f64, u32)> = rows.iter().map(|r| (ix.alpha[r.1 as usize].0, r.1)).collect();
        let mut width = 1usize;
        loop {
            let mut best = Vec::with_capacity(n);
            for block in level.chunks(width) {
                let mut keep = block[0].1;
                for &(_, k) in block {
                    if ix.alpha[k as usize].1 > ix.alpha[keep as usize].1 {
                        keep = k;
                    }
                    best.push(keep);
                }
            }
            ix.best.push(best);
            if width >= n {
                ix.levels.push(level);
                break;
            }
            let mut next = Vec::with_capacity(n);
            for pair in level.chunks(2 * width) {
                let (a, b) = pair.split_at(width.min(pair.len()));
                let (mut i, mut j) = (0, 0);
                while i < a.len() && j < b.len() {
                    if a[i].0 <= b[j].0 {
                        next.push(a[i]);
                        i += 1;
                    } else {
                        next.push(b[j]);
                        j += 1;
                    }
                }
                next.extend_from_slice(&a[i..]);
                next.extend_from_slice(&b[j..]);
            }
            ix.levels.push(std::mem::replace(&mut level, next));
            width *= 2;
        }
        ix
    }

    /// Object of `objs` intersecting the query segment, if any.
    fn find(&self, objs: &[Seg], qa: Point, qb: Point, eps: f64) -> Option<u32> {
        if self.betas.is_empty() {
            return None;
        }
        let (aa, ba) = self.coords(qa);
        let (ab, bb) = self.coords(qb);
        let alpha = 0.5 * (aa + ab);
        let (blo, bhi) = (ba.min(bb) - self.slack, ba.max(bb) + self.slack);
        let mut l = self.betas.partition_point(|&b| b < blo);
        let mut r = self.betas.partition_point(|&b| b <= bhi);
        let n = self.betas.len();
        let visit = |lvl: usize, block: usize| -> Option<u32> {
            let lo = block << lvl;
            let hi = ((block + 1) << lvl).min(n);
            let list = &self.levels[lvl][lo..hi];
            let end = list.partition_point(|e| e.0 <= alpha + self.slack);
            if end == 0 {
                return None;
            }
            let top = self.best[lvl][lo + end - 1] as usize;
            if self.alpha[top].1 < alpha - self.slack {
                return None;
            }
            if segments_intersect(objs[top].a, objs[top].b, qa, qb, eps) {
                return Some(objs[top].id);
            }
            list[..end]
                .iter()
                .filter(|e| self.alpha[e.1 as usize].1 >= alpha - self.slack)
                .map(|e| objs[e.1 as usize])
                .find(|s| segments_intersect(s.a, s.b, qa, qb, eps))
                .map(|s| s.id)
        };
        let mut lvl = 0;
        while l < r {
            if l & 1 == 1 {
                if let Some(h) = visit(lvl, l) {
                    return Some(h);
                }
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                if let Some(h) = visit(lvl, r) {
                    return Some(h);
                }
            }
            l >>= 1;
            r >>= 1;
            lvl += 1;
        }
        None
    }
}

/// Segments of one slope class with per-query-class search structures.
#[derive(Clone, Debug)]
pub(crate) struct ParallelSet {
    objs: Vec<Seg>,
    dir: Point,
    eps: f64,
    /// Objects sorted by the offset of their supporting line.
    offsets: Vec<(f64, usize)>,
    cross: Vec<(u32, CrossIndex)>,
}

impl ParallelSet {
    /// Indexes `objs` (all of direction `dir`) for queries whose directions
    /// are `(class, direction)` pairs in `query_dirs`.
    pub fn new(objs: Vec<Seg>, dir: Point, query_dirs: &[(u32, Point)], eps: f64) -> Self {
        let unit = dir.scale(1.0 / dir.norm());
        let mut offsets: Vec<(f64, usize)> = objs.iter().enumerate().map(|(k, s)| (unit.cross(s.a), k)).collect();
        offsets.sort_by(|x, y| x.0.total_cmp(&y.0));
        let cross = query_dirs
            .iter()
            .filter(|_| objs.len() > SCAN_LIMIT)
            .filter(|(_, d)| d.cross(dir).abs() > 1e-12 * d.norm() * dir.norm())
            .map(|&(c, d)| (c, CrossIndex::new(&objs, dir, d, eps)))
            .collect();
        ParallelSet {
            objs,
            dir: unit,
            eps,
            offsets,
            cross,
        }
    }

    /// An object intersecting the query segment `qa qb` of slope class
    /// `qclass`, if any.
    pub fn find(&self, qa: Point, qb: Point, qclass: u32) -> Option<u32> {
        if self.objs.is_empty() {
            return None;
        }
        if self.objs.len() <= SCAN_LIMIT {
            return self
                .objs
                .iter()
                .find(|o| segments_intersect(o.a, o.b, qa, qb, self.eps))
                .map(|o| o.id);
        }
        if let Some((_, ix)) = self.cross.iter().find(|(c, _)| *c == qclass) {
            return ix.find(&self.objs, qa, qb, self.eps);
        }
        // Parallel query: only objects on (nearly) the same line qualify.
        let w = 0.5 * (self.dir.cross(qa) + self.dir.cross(qb));
        let s = 4.0 * self.eps + 1e-12;
        let lo = self.offsets.partition_point(|e| e.0 < w - s);
        self.offsets[lo..]
            .iter()
            .take_while(|e| e.0 <= w + s)
            .map(|e| self.objs[e.1])
            .find(|o| segments_intersect(o.a, o.b, qa, qb, self.eps))
            .map(|o| o.id)
    }

    /// Pairs of objects lying on a common line and overlapping.
    pub fn collinear_overlap(&self) -> Option<(u32, u32)> {
        let s = 4.0 * self.eps + 1e-12;
        for (i, &(w, k)) in self.offsets.iter().enumerate() {
            for &(_, k2) in self.offsets[i + 1..].iter().take_while(|e| e.0 <= w + s) {
                let (a, b) = (self.objs[k], self.objs[k2]);
                if segments_intersect(a.a, a.b, b.a, b.b, self.eps) {
                    return Some((a.id, b.id));
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_brute_force_for_all_class_pairs() {
        let dirs = [Point::new(1.0, 0.0), Point::new(0.0, 1.0), Point::new(1.0, 1.0)];
        let qd: Vec<(u32, Point)> = dirs.iter().enumerate().map(|(i, &d)| (i as u32 + 1, d)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let grid = |rng: &mut ChaCha8Rng| (rng.gen_range(0..12) as f64) / 2.0;
        for oc in 0..3 {
            let objs: Vec<Seg> = (0..80)
                .map(|k| {
                    let a = Point::new(grid(&mut rng), grid(&mut rng));
                    let b = a.add(dirs[oc].scale(rng.gen_range(1..5) as f64 / 2.0));
                    Seg { a, b, id: k }
                })
                .collect();
            let set = ParallelSet::new(objs.clone(), dirs[oc], &qd, 1e-9);
            for _ in 0..300 {
                let qc = rng.gen_range(0..3);
                let a = Point::new(grid(&mut rng), grid(&mut rng));
                let b = a.add(dirs[qc].scale(rng.gen_range(1..6) as f64 / 2.0));
                let want = objs.iter().any(|o| segments_intersect(o.a, o.b, a, b, 1e-9));
                let got = set.find(a, b, qc as u32 + 1);
                assert_eq!(got.is_some(), want);
                if let Some(id) = got {
                    let o = objs[id as usize];
                    assert!(segments_intersect(o.a, o.b, a, b, 1e-9));
                }
            }
        }
    }
}
