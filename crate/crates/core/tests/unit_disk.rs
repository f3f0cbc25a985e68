use std::f64::consts::TAU;

use geodiam_core::geometry::{Point, PredicateConfig, Ray, Shape};
use geodiam_core::oracle::{build_graph, diameter_at_most};
use geodiam_core::unit_disk::reference;
use geodiam_core::unit_disk::{
    build_canonical_family, check_cell_pair, check_cell_pair_counted, decide_diam2_with, flower_ray_shoot,
    pairwise_boundary_in_cone, CellPairContext, CellPairSolver, PairwiseBoundary, Side, UnitDiskConfig, UnitDiskStats,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DELTA: f64 = 0.05;
const RHO: f64 = 1.0;

/// A random valid cell pair with cell `A` at the origin.
fn random_ctx(rng: &mut ChaCha8Rng) -> CellPairContext {
    loop {
        let th = rng.gen_range(0.0..TAU);
        let r = rng.gen_range(0.9..2.05);
        let b = Point::new((r * th.cos() / DELTA).round() * DELTA, (r * th.sin() / DELTA).round() * DELTA);
        let far = geodiam_core::unit_disk::square_distance(Point::new(0.0, 0.0), b, DELTA) > 1.95;
        if let (false, Ok(ctx)) = (far, CellPairContext::new(Point::new(0.0, 0.0), b, DELTA, RHO)) {
            return ctx;
        }
    }
}

fn in_square(rng: &mut ChaCha8Rng, lo: Point) -> Point {
    Point::new(lo.x + rng.gen_range(0.0..DELTA), lo.y + rng.gen_range(0.0..DELTA))
}

/// Random centers relevant to both cells.
fn relevant_disks(rng: &mut ChaCha8Rng, ctx: &CellPairContext, m: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(m);
    let c = ctx.cell_a.midpoint(ctx.cell_b);
    while out.len() < m {
        let p = Point::new(c.x + rng.gen_range(-1.2..1.2), c.y + rng.gen_range(-1.2..1.2));
        if ctx.is_relevant(p) {
            out.push(p);
        }
    }
    out
}

fn sorted(mut v: Vec<(u64, u64)>) -> Vec<(u64, u64)> {
    v.sort_unstable();
    v.dedup();
    v
}

fn key(p: Point) -> (u64, u64) {
    (p.x.to_bits(), p.y.to_bits())
}

#[test]
fn flower_subsets_match_containment() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let ctx = random_ctx(&mut rng);
        let disks = relevant_disks(&mut rng, &ctx, 60);
        let fam = build_canonical_family(&disks, &ctx).unwrap();
        for _ in 0..20 {
            let p = if rng.gen_bool(0.5) {
                in_square(&mut rng, ctx.cell_a)
            } else {
                Point::new(rng.gen_range(-1.0..2.0), rng.gen_range(-1.0..2.0))
            };
            let fp = fam.flower(p);
            let got = sorted(fam.flower_disks(&fp).iter().map(|&d| key(fam.disks()[d as usize])).collect());
            let want = sorted(reference::flower_disks(&disks, p, RHO).iter().map(|&i| key(disks[i])).collect());
            assert_eq!(got, want);
        }
    }
}

#[test]
fn ray_shoot_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let ctx = random_ctx(&mut rng);
        let m = rng.gen_range(1..40);
        let disks = relevant_disks(&mut rng, &ctx, m);
        let fam = build_canonical_family(&disks, &ctx).unwrap();
        let p = in_square(&mut rng, ctx.cell_a);
        let fp = fam.flower(p);
        let th = rng.gen_range(0.0..TAU);
        match reference::flower_radial(&disks, p, ctx.origin, RHO, th) {
            None => assert!(flower_ray_shoot(&fam, &fp, &Ray::new(ctx.origin, th)).is_err()),
            Some(want) => {
                let hit = flower_ray_shoot(&fam, &fp, &Ray::new(ctx.origin, th)).unwrap();
                assert!((hit.distance - want).abs() < 1e-9, "{} vs {want}", hit.distance);
                let members: Vec<Point> = reference::flower_disks(&disks, p, RHO).iter().map(|&i| disks[i]).collect();
                let (count, exit) = reference::ray_boundary(&members, ctx.origin, th, RHO);
                assert_eq!(count, 1);
                assert!((exit - want).abs() < 1e-9);
                for d in &hit.disks {
                    assert!((fam.disks()[*d as usize].dist(hit.point) - RHO).abs() < 1e-9);
                }
            }
        }
    }
}

fn radial_or_zero(disks: &[Point], p: Point, ctx: &CellPairContext, th: f64) -> f64 {
    reference::flower_radial(disks, p, ctx.origin, RHO, th).unwrap_or(0.0)
}

#[test]
fn pairwise_description_matches_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut breaks, mut wholes) = (0, 0);
    // Breakpoints are rare for random flowers (well under 1% of draws), so
    // keep drawing until several of each kind have been checked.
    for _ in 0..20_000 {
        if breaks >= 5 && wholes >= 100 {
            break;
        }
        let ctx = random_ctx(&mut rng);
        let m = rng.gen_range(2..120);
        let disks = relevant_disks(&mut rng, &ctx, m);
        let fam = build_canonical_family(&disks, &ctx).unwrap();
        let (p, q) = (in_square(&mut rng, ctx.cell_a), in_square(&mut rng, ctx.cell_a));
        let (fp, fq) = (fam.flower(p), fam.flower(q));
        if fp.subset_indices.is_empty() || fq.subset_indices.is_empty() {
            continue;
        }
        let desc = pairwise_boundary_in_cone(&fam, &ctx, &fp, &fq).unwrap();
        match desc {
            PairwiseBoundary::Whole(_) => wholes += 1,
            PairwiseBoundary::Breakpoint { .. } => breaks += 1,
        }
        for k in 0..256 {
            let t = ctx.cone.width * (k as f64 + 0.5) / 256.0;
            let th = ctx.cone.angle(t);
            let (rp, rq) = (radial_or_zero(&disks, p, &ctx, th), radial_or_zero(&disks, q, &ctx, th));
            let got = if desc.side_at(t) == Side::P { rp } else { rq };
            assert!((got - rp.min(rq)).abs() < 1e-9, "{desc:?} at {t}: {rp} {rq}");
        }
    }
    assert!(breaks >= 5 && wholes >= 100, "breaks {breaks}, wholes {wholes}");
}

#[test]
fn identical_and_nested_flowers_give_whole_boundaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut nested = 0;
    for _ in 0..300 {
        let ctx = random_ctx(&mut rng);
        let m = rng.gen_range(2..10);
        let disks = relevant_disks(&mut rng, &ctx, m);
        let fam = build_canonical_family(&disks, &ctx).unwrap();
        let (p, q) = (in_square(&mut rng, ctx.cell_a), in_square(&mut rng, ctx.cell_a));
        let (fp, fq) = (fam.flower(p), fam.flower(q));
        if fp.subset_indices.is_empty() || fq.subset_indices.is_empty() {
            continue;
        }
        assert_eq!(pairwise_boundary_in_cone(&fam, &ctx, &fp, &fp).unwrap(), PairwiseBoundary::Whole(Side::P));
        let dp = reference::flower_disks(&disks, p, RHO);
        let dq = reference::flower_disks(&disks, q, RHO);
        let subset = dp.iter().all(|i| dq.contains(i));
        let strictly_inside = (0..64).all(|k| {
            let th = ctx.cone.angle(ctx.cone.width * k as f64 / 63.0);
            radial_or_zero(&disks, p, &ctx, th) < radial_or_zero(&disks, q, &ctx, th) - 1e-7
        });
        if subset && strictly_inside {
            nested += 1;
            assert_eq!(pairwise_boundary_in_cone(&fam, &ctx, &fp, &fq).unwrap(), PairwiseBoundary::Whole(Side::P));
        }
    }
    assert!(nested > 0);
}

/// Chain over `pts` merged left to right, and the full solver.
fn chain_min_check(rng: &mut ChaCha8Rng, k: usize, m: usize) -> Option<(usize, usize)> {
    let ctx = random_ctx(rng);
    let disks = relevant_disks(rng, &ctx, m);
    let fam = build_canonical_family(&disks, &ctx).unwrap();
    let pts: Vec<Point> = (0..k).map(|_| in_square(rng, ctx.cell_a)).collect();
    let mut solver = CellPairSolver::new(&fam, &ctx, &pts).unwrap();
    if solver.flowers().iter().any(|f| f.subset_indices.is_empty()) {
        return None;
    }
    let split = k / 2;
    let mut left = solver.leaf_chain(0);
    for i in 1..split.max(1) {
        let leaf = solver.leaf_chain(i as u32);
        left = solver.sweep_merge(&left, &leaf).unwrap();
    }
    let mut right = solver.leaf_chain(split.max(1) as u32);
    for i in split.max(1) + 1..k {
        let leaf = solver.leaf_chain(i as u32);
        right = solver.sweep_merge(&right, &leaf).unwrap();
    }
    let merged = solver.sweep_merge(&left, &right).unwrap();
    assert_eq!(solver.sweep_merge(&merged, &merged).unwrap(), merged);
    let full = solver.intersect_all().unwrap();
    for w in merged.entries.windows(2) {
        assert_eq!(w[0].end, w[1].start);
        assert_ne!(w[0].point, w[1].point);
    }
    for j in 0..256 {
        let t = ctx.cone.width * (j as f64 + 0.5) / 256.0;
        let th = ctx.cone.angle(t);
        let want = pts
            .iter()
            .map(|&p| radial_or_zero(&disks, p, &ctx, th))
            .fold(f64::INFINITY, f64::min);
        assert!((solver.chain_radial(&merged, t) - want).abs() < 1e-9);
        assert!((solver.chain_radial(&full, t) - want).abs() < 1e-9);
    }
    Some((full.entries.len(), k))
}

#[test]
fn sweep_merge_is_pointwise_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut done = 0;
    for _ in 0..300 {
        let k = rng.gen_range(2..=8);
        let m = rng.gen_range(3..40);
        if chain_min_check(&mut rng, k, m).is_some() {
            done += 1;
        }
    }
    assert!(done > 100);
}

#[test]
fn chain_size_is_at_most_six_per_flower() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..40 {
        let k = rng.gen_range(2..60);
        if let Some((entries, k)) = chain_min_check(&mut rng, k, 120) {
            assert!(entries <= 6 * k, "{entries} entries for {k} flowers");
            worst = worst.max(entries as f64 / k as f64);
        }
    }
    assert!(worst <= 6.0);
}

#[test]
fn flower_boundaries_cross_at_most_twice() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut max_seen = 0;
    for _ in 0..150 {
        let ctx = random_ctx(&mut rng);
        let m = rng.gen_range(2..=40);
        let disks = relevant_disks(&mut rng, &ctx, m);
        for _ in 0..5 {
            let (p, q) = (in_square(&mut rng, ctx.cell_a), in_square(&mut rng, ctx.cell_a));
            if reference::flower_disks(&disks, p, RHO).is_empty() || reference::flower_disks(&disks, q, RHO).is_empty() {
                continue;
            }
            let c = reference::crossing_count(&disks, p, q, ctx.origin, RHO);
            max_seen = max_seen.max(c);
            assert!(c <= 2, "{c} crossings");
        }
    }
    assert_eq!(max_seen, 2);
}

/// Flowers in a point set: the union of the disks centered at the points
/// adjacent to `p` (including `p`).
fn point_flower(pts: &[Point], p: Point) -> Vec<Point> {
    pts.iter().copied().filter(|x| x.dist(p) <= 1.0).collect()
}

#[test]
fn rays_from_near_the_flower_center_cross_once() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let n = rng.gen_range(1..30);
        let pts: Vec<Point> = (0..n)
            .map(|_| Point::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
            .collect();
        let p = pts[0];
        let flower = point_flower(&pts, p);
        let y = p.add(Point::from_angle(rng.gen_range(0.0..TAU)).scale(rng.gen_range(0.0..0.4999)));
        for k in 0..64 {
            let th = TAU * k as f64 / 64.0 + 0.01;
            assert_eq!(reference::ray_boundary(&flower, y, th, 1.0).0, 1);
        }
    }
}

#[test]
fn beyond_an_overlap_on_the_side_of_q_the_boundary_is_that_of_p() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut exercised = 0;
    for _ in 0..400 {
        let n = rng.gen_range(3..25);
        let mut pts: Vec<Point> = (0..n)
            .map(|_| Point::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
            .collect();
        let p = Point::new(0.0, 0.0);
        let q = Point::from_angle(rng.gen_range(0.0..TAU)).scale(rng.gen_range(0.05..0.45));
        pts.push(p);
        pts.push(q);
        let (fp, fq) = (point_flower(&pts, p), point_flower(&pts, q));
        let o = p.midpoint(q);
        let pq = q.sub(p);
        // Overlap points of the two boundaries in H_q, off the line pq.
        for k in 0..2048 {
            let th = TAU * (k as f64 + 0.5) / 2048.0;
            let (ep, eq) = (reference::ray_boundary(&fp, o, th, 1.0).1, reference::ray_boundary(&fq, o, th, 1.0).1);
            if (ep - eq).abs() > 1e-12 {
                continue;
            }
            let x = o.add(Point::from_angle(th).scale(ep));
            let side = pq.cross(x.sub(p));
            if x.dist(q) >= x.dist(p) - 1e-9 || side.abs() < 1e-6 {
                continue;
            }
            exercised += 1;
            // Cone at q between the ray towards x and the ray continuing pq.
            let a0 = x.sub(q).angle();
            let a1 = pq.angle();
            let mut span = (a1 - a0).rem_euclid(TAU);
            let ccw = span <= std::f64::consts::PI;
            if !ccw {
                span = TAU - span;
            }
            for j in 1..32 {
                let phi = if ccw { a0 + span * j as f64 / 32.0 } else { a0 - span * j as f64 / 32.0 };
                let bp = reference::ray_boundary(&fp, q, phi, 1.0).1;
                let bq = reference::ray_boundary(&fq, q, phi, 1.0).1;
                assert!(bp <= bq + 1e-9, "boundary of the intersection leaves F_p: {bp} > {bq}");
            }
        }
    }
    assert!(exercised > 50, "only {exercised} overlap points");
}

#[test]
fn cell_pair_check_matches_all_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut yes, mut no) = (0, 0);
    for round in 0..12 {
        let ctx = random_ctx(&mut rng);
        let disks = relevant_disks(&mut rng, &ctx, 200);
        let k = if round < 6 { 150 } else { 12 };
        let a: Vec<Point> = (0..k).map(|_| in_square(&mut rng, ctx.cell_a)).collect();
        let b: Vec<Point> = (0..k).map(|_| in_square(&mut rng, ctx.cell_b)).collect();
        let want = reference::cell_pair(&a, &b, &disks, RHO);
        let (got, _, entries) = check_cell_pair_counted(&ctx, &a, &b, &disks).unwrap();
        assert_eq!(got, want);
        assert!(entries <= 6 * k);
        if want {
            yes += 1;
        } else {
            no += 1;
        }
        // Per single target point as well.
        for &q in b.iter().take(10) {
            assert_eq!(
                check_cell_pair(&ctx, &a, &[q], &disks).unwrap(),
                reference::cell_pair(&a, &[q], &disks, RHO)
            );
        }
    }
    assert!(yes > 0 && no > 0, "yes {yes} no {no}");
}

fn oracle(points: &[Point]) -> bool {
    let shapes: Vec<Shape> = points.iter().map(|&c| Shape::UnitDisk { center: c }).collect();
    diameter_at_most(&build_graph(&shapes, &PredicateConfig::default()).unwrap(), 2)
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, side: f64) -> Vec<Point> {
    (0..n)
        .map(|_| Point::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side)))
        .collect()
}

#[test]
fn decision_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut yes, mut no) = (0, 0);
    let mut pipeline = 0;
    for round in 0..240 {
        let n = rng.gen_range(2..120);
        let side = [2.0, 2.8, 3.2, 3.6, 4.0][round % 5];
        let pts = random_points(&mut rng, n, side);
        let want = oracle(&pts);
        for shortcuts in [true, false] {
            let cfg = UnitDiskConfig {
                shortcuts,
                ..UnitDiskConfig::default()
            };
            let mut st = UnitDiskStats::default();
            assert_eq!(decide_diam2_with(&pts, &cfg, &mut st).unwrap(), want, "round {round} n {n}");
            pipeline += st.pipeline_pairs;
        }
        if want {
            yes += 1;
        } else {
            no += 1;
        }
    }
    assert!(yes > 30 && no > 30, "yes {yes} no {no}");
    assert!(pipeline > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decision_equals_oracle(seed in any::<u64>(), n in 2usize..40, side in 1.5f64..3.2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = random_points(&mut rng, n, side);
        let want = oracle(&pts);
        let cfg = UnitDiskConfig { shortcuts: false, ..UnitDiskConfig::default() };
        prop_assert_eq!(decide_diam2_with(&pts, &cfg, &mut UnitDiskStats::default()).unwrap(), want);
    }

    #[test]
    fn cell_pair_equals_all_pairs(seed in any::<u64>(), k in 1usize..20, m in 0usize..50) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = random_ctx(&mut rng);
        let disks = relevant_disks(&mut rng, &ctx, m);
        let a: Vec<Point> = (0..k).map(|_| in_square(&mut rng, ctx.cell_a)).collect();
        let b: Vec<Point> = (0..k).map(|_| in_square(&mut rng, ctx.cell_b)).collect();
        prop_assert_eq!(check_cell_pair(&ctx, &a, &b, &disks).unwrap(), reference::cell_pair(&a, &b, &disks, RHO));
    }
}
