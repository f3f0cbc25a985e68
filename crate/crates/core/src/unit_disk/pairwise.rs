//! Boundary of the intersection of two flowers inside the cone.

use super::envelope::{compare, envelope_of, Cmp};
use super::family::{CanonicalFamily, CellPairContext, FlowerRef};
use crate::error::{GeoError, Result};
use crate::geometry::Point;

/// Tolerance for validating a computed description against the radial
/// functions.
const CHECK_TOL: f64 = 1e-9;

/// One of the two flowers of a pairwise description.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// The first flower.
    P,
    /// The second flower.
    Q,
}

impl Side {
    /// The opposite side.
    pub fn other(self) -> Side {
        match self {
            Side::P => Side::Q,
            Side::Q => Side::P,
        }
    }
}

/// Boundary of `F_p ∩ F_q` inside the cone: one flower throughout, or one
/// flower on each side of a single ray from the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PairwiseBoundary {
    /// The boundary of the given flower throughout the cone.
    Whole(Side),
    /// Split at cone-local angle `t`.
    Breakpoint {
        /// Cone-local angle of the splitting ray.
        t: f64,
        /// The boundary point on the splitting ray.
        point: Point,
        /// The flower forming the boundary for angles larger than `t`.
        upper_side: Side,
    },
}

impl PairwiseBoundary {
    /// The flower forming the boundary at cone-local angle `t`.
    pub fn side_at(&self, t: f64) -> Side {
        match *self {
            PairwiseBoundary::Whole(s) => s,
            PairwiseBoundary::Breakpoint { t: a, upper_side, .. } => {
                if t >= a {
                    upper_side
                } else {
                    upper_side.other()
                }
            }
        }
    }

    /// The same description with the roles of the two flowers exchanged.
    pub fn swapped(self) -> Self {
        match self {
            PairwiseBoundary::Whole(s) => PairwiseBoundary::Whole(s.other()),
            PairwiseBoundary::Breakpoint { t, point, upper_side } => PairwiseBoundary::Breakpoint {
                t,
                point,
                upper_side: upper_side.other(),
            },
        }
    }
}

/// True when the ray from `from` through `through` meets the closed square
/// `[lo, lo + side]²`.
fn ray_hits_square(from: Point, through: Point, lo: Point, side: f64) -> bool {
    let d = through.sub(from);
    let (mut t0, mut t1) = (0.0f64, f64::INFINITY);
    for (o, dv, l) in [(from.x, d.x, lo.x), (from.y, d.y, lo.y)] {
        let h = l + side;
        if dv == 0.0 {
            if o < l || o > h {
                return false;
            }
        } else {
            let (a, b) = ((l - o) / dv, (h - o) / dv);
            t0 = t0.max(a.min(b));
            t1 = t1.min(a.max(b));
        }
    }
    t0 <= t1
}

/// Classification of a probe ray: which flower is the lower boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Probe {
    /// `F_q` is nearer the origin (strictly, or by the overlap rule).
    QMin,
    /// `F_p` is nearer the origin (strictly, or by the overlap rule).
    PMin,
}

struct Pair<'a> {
    family: &'a CanonicalFamily,
    fp: &'a FlowerRef,
    fq: &'a FlowerRef,
}

impl Pair<'_> {
    fn radii(&self, t: f64) -> (f64, f64) {
        let th = self.family.cone().angle(t);
        let rp = self.family.radial(self.fp, th).map_or(0.0, |v| v.0);
        let rq = self.family.radial(self.fq, th).map_or(0.0, |v| v.0);
        (rp, rq)
    }

    fn probe(&self, t: f64) -> Probe {
        let (rp, rq) = self.radii(t);
        let f = rp - rq;
        let tol = 1e-12 * rp.max(1.0);
        if f > tol {
            Probe::QMin
        } else if f < -tol {
            Probe::PMin
        } else {
            // Overlap point: beyond it (towards the nearer of p and q) the
            // boundary belongs to the flower of the farther point.
            let x = self
                .family
                .origin()
                .add(Point::from_angle(self.family.cone().angle(t)).scale(rp));
            if x.dist(self.fq.point) < x.dist(self.fp.point) {
                Probe::PMin
            } else {
                Probe::QMin
            }
        }
    }

    fn check(&self, desc: &PairwiseBoundary) -> Result<()> {
        let w = self.family.cone().width;
        let mut ts = vec![0.0, w / 2.0, w];
        if let PairwiseBoundary::Breakpoint { t, .. } = desc {
            ts.extend([t / 2.0, (t + w) / 2.0]);
        }
        for t in ts {
            let (rp, rq) = self.radii(t);
            let ok = match desc.side_at(t) {
                Side::P => rp <= rq + CHECK_TOL,
                Side::Q => rq <= rp + CHECK_TOL,
            };
            if !ok {
                return Err(GeoError::Validation(format!(
                    "pairwise boundary disagrees with the flowers at cone angle {t}: {rp} vs {rq}"
                )));
            }
        }
        Ok(())
    }
}

/// Describes the boundary of `F_p ∩ F_q` inside the context's cone.
///
/// When the line through the two points meets cell `B`, the flower of the
/// point farther from `B` forms the whole boundary. Otherwise a binary
/// search over the family's vertex array locates the gap containing the
/// single switch from `F_q` (on the side of `p`) to `F_p`, and a sweep over
/// the arcs inside that gap pins the switching angle. The result is checked
/// against the radial functions and a disagreement is reported as
/// [`GeoError::Validation`].
pub fn pairwise_boundary_in_cone(
    family: &CanonicalFamily,
    ctx: &CellPairContext,
    fp: &FlowerRef,
    fq: &FlowerRef,
) -> Result<PairwiseBoundary> {
    if family.cone() != ctx.cone || family.origin() != ctx.origin {
        return Err(GeoError::Parameter("family was built for a different cell pair".into()));
    }
    if !ctx.in_cell_a(fp.point) || !ctx.in_cell_a(fq.point) {
        return Err(GeoError::Parameter("flower points must lie in the source cell".into()));
    }
    if fp.subset_indices.is_empty() || fq.subset_indices.is_empty() {
        return Err(GeoError::EmptyFlower);
    }
    let (p, q) = (fp.point, fq.point);
    if p == q || fp.subset_indices == fq.subset_indices {
        return Ok(PairwiseBoundary::Whole(Side::P));
    }
    let pair = Pair { family, fp, fq };
    let cone = ctx.cone;
    let w = cone.width;
    if ray_hits_square(p, q, ctx.cell_b, ctx.delta) {
        let d = PairwiseBoundary::Whole(Side::P);
        pair.check(&d)?;
        return Ok(d);
    }
    if ray_hits_square(q, p, ctx.cell_b, ctx.delta) {
        let d = PairwiseBoundary::Whole(Side::Q);
        pair.check(&d)?;
        return Ok(d);
    }

    // τ measures the angle from the cone boundary on the side of p.
    let center_b = Point::new(ctx.cell_b.x + ctx.delta / 2.0, ctx.cell_b.y + ctx.delta / 2.0);
    let p_high = p.sub(q).cross(center_b.sub(q)) < 0.0;
    let to_t = |tau: f64| if p_high { w - tau } else { tau };
    let upper_side = if p_high { Side::Q } else { Side::P };

    if pair.probe(to_t(0.0)) == Probe::PMin {
        let d = PairwiseBoundary::Whole(Side::P);
        pair.check(&d)?;
        return Ok(d);
    }
    if pair.probe(to_t(w)) == Probe::QMin {
        let d = PairwiseBoundary::Whole(Side::Q);
        pair.check(&d)?;
        return Ok(d);
    }

    let mut taus: Vec<f64> = Vec::with_capacity(family.lambda().len() + 2);
    taus.push(0.0);
    let inner = family.lambda().iter().map(|e| e.t).filter(|&t| t > 0.0 && t < w);
    if p_high {
        let mut v: Vec<f64> = inner.map(|t| w - t).collect();
        v.reverse();
        taus.extend(v);
    } else {
        taus.extend(inner);
    }
    taus.push(w);
    let (mut lo, mut hi) = (0usize, taus.len() - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match pair.probe(to_t(taus[mid])) {
            Probe::QMin => lo = mid,
            Probe::PMin => hi = mid,
        }
    }
    let (tau0, tau1) = (taus[lo], taus[hi]);
    let a = if tau1 - tau0 <= 1e-15 {
        tau0
    } else {
        gap_switch(&pair, to_t(tau0), to_t(tau1), p_high, tau0)?
    };
    let d = if a <= 0.0 {
        PairwiseBoundary::Whole(Side::P)
    } else if a >= w {
        PairwiseBoundary::Whole(Side::Q)
    } else {
        let t = to_t(a);
        let (rp, rq) = pair.radii(t);
        PairwiseBoundary::Breakpoint {
            t,
            point: ctx.origin.add(Point::from_angle(cone.angle(t)).scale(rp.min(rq))),
            upper_side,
        }
    };
    pair.check(&d)?;
    Ok(d)
}

/// Inside a gap free of canonical vertices, every canonical subset of the
/// two flowers contributes one arc. Builds both upper envelopes of those
/// arcs and returns the τ of the last strict `F_q`-minimum.
fn gap_switch(pair: &Pair, ta: f64, tb: f64, p_high: bool, tau0: f64) -> Result<f64> {
    let fam = pair.family;
    let circles = fam.circles();
    let (t0, t1) = if ta <= tb { (ta, tb) } else { (tb, ta) };
    let mid = fam.cone().angle(0.5 * (t0 + t1)).rem_euclid(std::f64::consts::TAU);
    let arcs = |f: &FlowerRef| -> Vec<u32> {
        let mut v: Vec<u32> = f
            .subset_indices
            .iter()
            .map(|&i| {
                let b = fam.boundary(i);
                b.disks[b.locate(mid)]
            })
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let base = fam.cone().lo;
    let ep = envelope_of(&arcs(pair.fp), base, t0, t1, &circles).ok_or(GeoError::EmptyFlower)?;
    let eq = envelope_of(&arcs(pair.fq), base, t0, t1, &circles).ok_or(GeoError::EmptyFlower)?;
    let mut pieces = compare(&ep, &eq, &circles);
    let w = fam.cone().width;
    // Express the pieces in τ order.
    if p_high {
        pieces.reverse();
        for pc in &mut pieces {
            *pc = (w - pc.1, w - pc.0, pc.2);
        }
    }
    let mut a = tau0;
    let mut seen_p = false;
    for &(_, s1, c) in &pieces {
        match c {
            Cmp::Greater => {
                if seen_p {
                    return Err(GeoError::Validation(
                        "flower boundaries switch more than once inside the cone".into(),
                    ));
                }
                a = s1;
            }
            Cmp::Less => seen_p = true,
            Cmp::Equal => {}
        }
    }
    Ok(a)
}
