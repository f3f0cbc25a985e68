//! Implicit boundary chains of flower intersections and the cell-pair test.

use std::collections::HashMap;

use super::family::{build_canonical_family, CanonicalFamily, CellPairContext, FlowerRef};
use super::pairwise::{pairwise_boundary_in_cone, PairwiseBoundary, Side};
use crate::error::{GeoError, Result};
use crate::geometry::Point;

/// One piece of a chain: the boundary of flower `point` over the cone-local
/// angles `[start, end]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainEntry {
    /// Index of the flower point in the solver's point list.
    pub point: u32,
    /// First cone-local angle of the piece.
    pub start: f64,
    /// Last cone-local angle of the piece.
    pub end: f64,
}

/// Boundary of an intersection of flowers inside the cone, as consecutive
/// pieces of individual flower boundaries covering `[0, width]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryChain {
    /// Identifier of the family the chain refers to.
    pub family_id: u64,
    /// Pieces in increasing angle; each starts where the previous ends.
    pub entries: Vec<ChainEntry>,
}

impl BoundaryChain {
    fn empty(family_id: u64) -> Self {
        BoundaryChain {
            family_id,
            entries: Vec::new(),
        }
    }

    /// Appends a piece, merging it into the last one when the flower repeats
    /// and dropping empty pieces.
    fn push(&mut self, point: u32, start: f64, end: f64) {
        if end <= start {
            return;
        }
        match self.entries.last_mut() {
            Some(last) if last.point == point => last.end = end,
            Some(last) => {
                last.end = start;
                self.entries.push(ChainEntry { point, start, end });
            }
            None => self.entries.push(ChainEntry { point, start, end }),
        }
    }

    /// The entry covering cone-local angle `t` (clamped to the chain).
    pub fn entry_at(&self, t: f64) -> &ChainEntry {
        let i = self.entries.partition_point(|e| e.end < t);
        &self.entries[i.min(self.entries.len() - 1)]
    }
}

/// State for intersecting the flowers of one source cell: the family, the
/// flowers of the cell's points and a cache of pairwise descriptions.
#[derive(Debug)]
pub struct CellPairSolver<'a> {
    family: &'a CanonicalFamily,
    ctx: &'a CellPairContext,
    flowers: Vec<FlowerRef>,
    cache: HashMap<(u32, u32), PairwiseBoundary>,
    /// Number of pairwise descriptions computed (cache misses).
    pub pairwise_calls: usize,
}

impl<'a> CellPairSolver<'a> {
    /// Computes the flowers of `points` (all in cell `A`).
    pub fn new(family: &'a CanonicalFamily, ctx: &'a CellPairContext, points: &[Point]) -> Result<Self> {
        if family.cone() != ctx.cone || family.origin() != ctx.origin {
            return Err(GeoError::Parameter("family was built for a different cell pair".into()));
        }
        if let Some(i) = points.iter().position(|p| !ctx.in_cell_a(*p)) {
            return Err(GeoError::Parameter(format!("point {i} lies outside the source cell")));
        }
        Ok(CellPairSolver {
            family,
            ctx,
            flowers: points.iter().map(|&p| family.flower(p)).collect(),
            cache: HashMap::new(),
            pairwise_calls: 0,
        })
    }

    /// Flowers of the points, in input order.
    pub fn flowers(&self) -> &[FlowerRef] {
        &self.flowers
    }

    /// Chain of a single flower: its boundary over the whole cone.
    pub fn leaf_chain(&self, point: u32) -> BoundaryChain {
        let mut c = BoundaryChain::empty(self.family.id());
        c.entries.push(ChainEntry {
            point,
            start: 0.0,
            end: self.ctx.cone.width,
        });
        c
    }

    fn pair(&mut self, p: u32, q: u32) -> Result<PairwiseBoundary> {
        let (a, b) = if p < q { (p, q) } else { (q, p) };
        let d = match self.cache.get(&(a, b)) {
            Some(d) => *d,
            None => {
                self.pairwise_calls += 1;
                let d = pairwise_boundary_in_cone(
                    self.family,
                    self.ctx,
                    &self.flowers[a as usize],
                    &self.flowers[b as usize],
                )?;
                self.cache.insert((a, b), d);
                d
            }
        };
        Ok(if p < q { d } else { d.swapped() })
    }

    /// Chain of the intersection of the regions of two chains, by a sweep
    /// over the union of their piece boundaries.
    pub fn sweep_merge(&mut self, ll1: &BoundaryChain, ll2: &BoundaryChain) -> Result<BoundaryChain> {
        let id = self.family.id();
        if ll1.family_id != id || ll2.family_id != id {
            return Err(GeoError::Parameter("chains belong to a different cell pair".into()));
        }
        if ll1.entries.is_empty() || ll2.entries.is_empty() {
            return Err(GeoError::Parameter("chains must be nonempty".into()));
        }
        let w = self.ctx.cone.width;
        let mut out = BoundaryChain::empty(id);
        let (mut i, mut j) = (0usize, 0usize);
        let mut cur = 0.0;
        while cur < w && i < ll1.entries.len() && j < ll2.entries.len() {
            let (e1, e2) = (ll1.entries[i], ll2.entries[j]);
            let nx = e1.end.min(e2.end).min(w);
            let (p, q) = (e1.point, e2.point);
            if p == q {
                out.push(p, cur, nx);
            } else {
                let pick = |s: Side| if s == Side::P { p } else { q };
                match self.pair(p, q)? {
                    PairwiseBoundary::Whole(s) => out.push(pick(s), cur, nx),
                    PairwiseBoundary::Breakpoint { t, upper_side, .. } => {
                        let lower = pick(upper_side.other());
                        let upper = pick(upper_side);
                        if t <= cur {
                            out.push(upper, cur, nx);
                        } else if t >= nx {
                            out.push(lower, cur, nx);
                        } else {
                            out.push(lower, cur, t);
                            out.push(upper, t, nx);
                        }
                    }
                }
            }
            cur = nx;
            if e1.end <= nx {
                i += 1;
            }
            if e2.end <= nx {
                j += 1;
            }
        }
        if let Some(last) = out.entries.last_mut() {
            last.end = w;
        }
        Ok(out)
    }

    /// Chain of the intersection of all flowers, merged bottom-up over a
    /// complete binary tree whose leaves are the points in input order.
    /// Requires every flower to be nonempty.
    pub fn intersect_all(&mut self) -> Result<BoundaryChain> {
        if self.flowers.is_empty() {
            return Err(GeoError::Parameter("no flowers to intersect".into()));
        }
        if self.flowers.iter().any(|f| f.subset_indices.is_empty()) {
            return Err(GeoError::EmptyFlower);
        }
        let mut level: Vec<BoundaryChain> = (0..self.flowers.len() as u32).map(|i| self.leaf_chain(i)).collect();
        while level.len() > 1 {
            let mut next = Vec::with_capacity(level.len().div_ceil(2));
            let mut it = level.chunks(2);
            for c in &mut it {
                if c.len() == 2 {
                    next.push(self.sweep_merge(&c[0], &c[1])?);
                } else {
                    next.push(c[0].clone());
                }
            }
            level = next;
        }
        Ok(level.pop().expect("one chain remains"))
    }

    /// Radial distance of a chain's boundary at cone-local angle `t`.
    pub fn chain_radial(&self, chain: &BoundaryChain, t: f64) -> f64 {
        let e = chain.entry_at(t);
        self.family
            .radial(&self.flowers[e.point as usize], self.ctx.cone.angle(t))
            .map_or(0.0, |v| v.0)
    }

    /// True when `q` lies in the region bounded by `chain` (the intersection
    /// of all flowers). Points whose distance is within rounding of the
    /// boundary are decided by an explicit containment test.
    pub fn contains(&self, chain: &BoundaryChain, q: Point) -> bool {
        let o = self.ctx.origin;
        let r = q.dist(o);
        if r == 0.0 {
            return true;
        }
        let t = self.ctx.cone.local_of_point(q);
        let bound = self.chain_radial(chain, t);
        if r < bound - 1e-9 {
            return true;
        }
        if r > bound + 1e-9 {
            return false;
        }
        self.flowers.iter().all(|f| self.in_flower(f, q))
    }

    /// Exact membership of `q` in one flower: some disk of the flower
    /// contains `q`.
    pub fn in_flower(&self, f: &FlowerRef, q: Point) -> bool {
        let rho = self.family.rho();
        f.subset_indices
            .iter()
            .flat_map(|&i| self.family.subset(i))
            .any(|&d| self.family.disks()[d as usize].dist(q) <= rho)
    }
}

/// Decides whether every point of `pts_b` lies in every flower of a point of
/// `pts_a`, where the flower of `p` is the union of the disks (centers
/// `disks`, radius `ctx.rho`) containing `p`.
///
/// Every disk must contain the context origin. Empty point sets are
/// vacuously fine.
pub fn check_cell_pair(ctx: &CellPairContext, pts_a: &[Point], pts_b: &[Point], disks: &[Point]) -> Result<bool> {
    Ok(check_cell_pair_counted(ctx, pts_a, pts_b, disks)?.0)
}

/// [`check_cell_pair`] also reporting the number of pairwise descriptions
/// computed and the number of entries of the final chain.
pub fn check_cell_pair_counted(
    ctx: &CellPairContext,
    pts_a: &[Point],
    pts_b: &[Point],
    disks: &[Point],
) -> Result<(bool, usize, usize)> {
    if pts_a.is_empty() || pts_b.is_empty() {
        return Ok((true, 0, 0));
    }
    if let Some(i) = pts_b.iter().position(|q| !ctx.in_cell_b(*q)) {
        return Err(GeoError::Parameter(format!("point {i} lies outside the target cell")));
    }
    let family = build_canonical_family(disks, ctx)?;
    let mut solver = CellPairSolver::new(&family, ctx, pts_a)?;
    if solver.flowers().iter().any(|f| f.subset_indices.is_empty()) {
        return Ok((false, 0, 0));
    }
    let chain = solver.intersect_all()?;
    let ok = pts_b.iter().all(|&q| solver.contains(&chain, q));
    Ok((ok, solver.pairwise_calls, chain.entries.len()))
}
