use geodiam_core::geometry::{segments_intersect, Point, PredicateConfig, Shape, SlopeTable};
use geodiam_core::oracle::{build_graph, diameter_at_most, IntersectionGraph};
use geodiam_core::segments::{
    compute_ordering, covers_query, interval_search, rainbow_ball_reference, ris_all_colors, segment_diam_at_most,
    BallGrower, ColorSequence, CoverIndex, IntervalRep, RainbowIndex,
};
use geodiam_core::GeoError;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_segments(rng: &mut ChaCha8Rng, n: usize, h: usize, side: f64) -> Vec<Shape> {
    let table = SlopeTable::first(h).unwrap();
    let steps = (side * 2.0) as i32;
    (0..n)
        .map(|_| {
            let c = rng.gen_range(1..=h as u32);
            let a = Point::new(rng.gen_range(0..=steps) as f64 / 2.0, rng.gen_range(0..=steps) as f64 / 2.0);
            let len = rng.gen_range(1..=6) as f64 / 2.0;
            let b = a.add(table.direction(c).unwrap().scale(len));
            Shape::Segment { a, b, slope_class: c }
        })
        .collect()
}

fn colors(shapes: &[Shape]) -> Vec<u32> {
    shapes
        .iter()
        .map(|s| match s {
            Shape::Segment { slope_class, .. } => *slope_class,
            _ => unreachable!(),
        })
        .collect()
}

fn parts(s: &Shape) -> (Point, Point) {
    let p = s.points();
    (p[0], p[1])
}

fn random_rep(rng: &mut ChaCha8Rng, n: u32) -> IntervalRep {
    let k = rng.gen_range(0..4);
    IntervalRep::from_intervals(
        (0..k)
            .map(|_| {
                let l = rng.gen_range(0..n);
                (l, (l + rng.gen_range(0..6)).min(n - 1))
            })
            .collect(),
    )
}

fn grower_for(shapes: &[Shape], h: usize) -> (BallGrower, IntersectionGraph) {
    let cfg = PredicateConfig::default();
    let g = build_graph(shapes, &cfg).unwrap();
    let ord = compute_ordering(&g).unwrap();
    (BallGrower::new(shapes, ord, &SlopeTable::first(h).unwrap(), &cfg).unwrap(), g)
}

#[test]
fn rainbow_index_matches_color_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let t = SlopeTable::default();
    let cfg = PredicateConfig::default();
    let mut checked = 0;
    for _ in 0..20 {
        // Distinct heights keep the index free of collinear overlaps.
        let mut ys: Vec<i32> = (0..400).collect();
        let segs: Vec<(Shape, u32)> = (0..200)
            .map(|_| {
                let y = ys.swap_remove(rng.gen_range(0..ys.len())) as f64 / 40.0;
                let x = rng.gen_range(0.0..8.0);
                let len = rng.gen_range(0.2..3.0);
                (
                    Shape::segment(Point::new(x, y), Point::new(x + len, y), &t).unwrap(),
                    rng.gen_range(1..=4),
                )
            })
            .collect();
        let ix = RainbowIndex::new(&segs, &t, &cfg).unwrap();
        for _ in 0..50 {
            let q = if rng.gen_bool(0.8) {
                let x = rng.gen_range(0.0..10.0);
                let y = rng.gen_range(0.0..10.0);
                Shape::segment(Point::new(x, y - rng.gen_range(0.0..8.0)), Point::new(x, y), &t).unwrap()
            } else {
                let (s, _) = &segs[rng.gen_range(0..segs.len())];
                let (a, _) = parts(s);
                let x = rng.gen_range(0.0..8.0);
                Shape::segment(Point::new(x, a.y), Point::new(x + 1.0, a.y), &t).unwrap()
            };
            let (qa, qb) = parts(&q);
            let want = ix.colors().iter().all(|&c| {
                segs.iter().any(|(s, k)| {
                    let (a, b) = parts(s);
                    *k == c && segments_intersect(a, b, qa, qb, cfg.epsilon)
                })
            });
            assert_eq!(ris_all_colors(&ix, &q).unwrap(), want);
            checked += 1;
        }
    }
    assert_eq!(checked, 1000);
}

#[test]
fn rainbow_index_rejects_collinear_overlap() {
    let t = SlopeTable::default();
    let s = |x0: f64, x1: f64| Shape::segment(Point::new(x0, 0.0), Point::new(x1, 0.0), &t).unwrap();
    let err = RainbowIndex::new(&[(s(0.0, 1.0), 1), (s(1.0, 2.0), 1)], &t, &PredicateConfig::default());
    assert!(matches!(err, Err(GeoError::DegenerateInput(_))));
    let vertical = Shape::segment(Point::new(0.0, 0.0), Point::new(0.0, 1.0), &t).unwrap();
    assert!(RainbowIndex::new(&[(s(0.0, 1.0), 1), (vertical, 1)], &t, &PredicateConfig::default()).is_err());
}

#[test]
fn cover_index_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let t = SlopeTable::default();
    let cfg = PredicateConfig::default();
    for _ in 0..60 {
        let n = rng.gen_range(1..50u32);
        let m = rng.gen_range(0..40);
        let shapes = random_segments(&mut rng, m, 3, 6.0);
        let objs: Vec<(Shape, IntervalRep)> = shapes.iter().map(|s| (s.clone(), random_rep(&mut rng, n))).collect();
        let ci = CoverIndex::new(&objs, n, &t, &cfg).unwrap();
        for q in random_segments(&mut rng, 30, 3, 6.0) {
            let (qa, qb) = parts(&q);
            let mut union = IntervalRep::empty();
            for (s, rep) in &objs {
                let (a, b) = parts(s);
                if segments_intersect(a, b, qa, qb, cfg.epsilon) {
                    union = union.union(rep);
                }
            }
            let incoming = random_rep(&mut rng, n);
            let got = interval_search(&ci, &q, &incoming).unwrap();
            assert!(got.is_normalized());
            assert_eq!(got, union.union(&incoming));
            assert_eq!(interval_search(&ci, &q, &got).unwrap(), got, "idempotence");
            let alone = interval_search(&ci, &q, &IntervalRep::empty()).unwrap();
            for _ in 0..10 {
                let l = rng.gen_range(0..n);
                let r = rng.gen_range(l..n);
                let want = (l..=r).all(|p| union.contains(p));
                assert_eq!(covers_query(&ci, &q, (l, r)).unwrap(), want);
                assert_eq!(alone.covers(l, r), want);
            }
        }
    }
}

#[test]
fn ordering_is_a_permutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let cfg = PredicateConfig::default();
    for n in [1usize, 3, 100] {
        let shapes = random_segments(&mut rng, n, 3, if n == 3 { 40.0 } else { 8.0 });
        let ord = compute_ordering(&build_graph(&shapes, &cfg).unwrap()).unwrap();
        let mut p = ord.perm.clone();
        p.sort_unstable();
        assert_eq!(p, (0..n as u32).collect::<Vec<_>>());
        for (i, &v) in ord.perm.iter().enumerate() {
            assert_eq!(ord.inverse[v as usize], i as u32);
        }
        assert!(ord.interval_count >= n);
    }
}

#[test]
fn breadth_first_order_of_a_path_gives_contiguous_neighborhoods() {
    // A staircase: horizontal and vertical pieces alternating, each meeting
    // only its predecessor and successor.
    let t = SlopeTable::default();
    let mut shapes = Vec::new();
    let mut p = Point::new(0.0, 0.0);
    for i in 0..30 {
        let q = if i % 2 == 0 { p.add(Point::new(1.0, 0.0)) } else { p.add(Point::new(0.0, 1.0)) };
        shapes.push(Shape::segment(p, q, &t).unwrap());
        p = q;
    }
    let ord = compute_ordering(&build_graph(&shapes, &PredicateConfig::default()).unwrap()).unwrap();
    assert!(ord.breadth_first);
    assert_eq!(ord.interval_count, shapes.len());
}

#[test]
fn balls_match_product_graph_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for (h, side) in [(1usize, 4.0), (2, 5.0), (3, 6.0)] {
        for _ in 0..6 {
            let m = rng.gen_range(1..40);
            let shapes = random_segments(&mut rng, m, h, side);
            let col = colors(&shapes);
            let (mut gr, g) = grower_for(&shapes, h);
            gr.grow_all(4).unwrap();
            for s in ColorSequence::all_up_to(h, 4) {
                let balls = gr.balls(&s).unwrap();
                for v in 0..shapes.len() {
                    let want = rainbow_ball_reference(&g, &col, v, s.colors());
                    assert_eq!(gr.ordering().vertices(&balls[v]), want, "S={:?} v={v}", s.colors());
                    assert!(balls[v].is_normalized());
                }
            }
        }
    }
}

#[test]
fn single_step_balls() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let shapes = random_segments(&mut rng, 30, 2, 4.0);
    let col = colors(&shapes);
    let (mut gr, g) = grower_for(&shapes, 2);
    let one = gr.grow_balls(&ColorSequence::new(vec![1], 2).unwrap()).unwrap();
    gr.grow_all(1).unwrap();
    let two = gr.grow_balls(&ColorSequence::new(vec![1, 2], 2).unwrap()).unwrap();
    for v in 0..shapes.len() {
        if col[v] == 1 {
            assert_eq!(gr.ordering().vertices(&one[v]), vec![v]);
            let mut want: Vec<usize> = g.adjacency[v].iter().map(|&w| w as usize).filter(|&w| col[w] == 2).collect();
            want.push(v);
            want.sort_unstable();
            assert_eq!(gr.ordering().vertices(&two[v]), want);
        }
    }
}

#[test]
fn balls_grow_with_supersequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    let shapes = random_segments(&mut rng, 40, 2, 5.0);
    let (mut gr, _) = grower_for(&shapes, 2);
    gr.grow_all(4).unwrap();
    let seqs = ColorSequence::all_up_to(2, 4);
    for a in &seqs {
        for b in seqs.iter().filter(|b| a.is_subsequence_of(b)) {
            for v in 0..shapes.len() {
                let (x, y) = (gr.ball(a, v).unwrap(), gr.ball(b, v).unwrap());
                assert_eq!(x.union(&y), y, "{:?} ⊑ {:?} at {v}", a.colors(), b.colors());
            }
        }
    }
}

#[test]
fn union_of_balls_is_the_bfs_ball() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    for h in 1..=3usize {
        let shapes = random_segments(&mut rng, 35, h, 5.0);
        let (mut gr, g) = grower_for(&shapes, h);
        for delta in 1..=3u32 {
            gr.grow_all(delta as usize + 1).unwrap();
            for v in 0..shapes.len() {
                let mut u = IntervalRep::empty();
                for s in ColorSequence::all_up_to(h, delta as usize + 1) {
                    u = u.union(&gr.ball(&s, v).unwrap());
                }
                assert_eq!(gr.ordering().vertices(&u), g.ball(v, delta));
            }
        }
    }
}

#[test]
fn decision_matches_oracle_on_degenerate_segments() {
    let mut rng = ChaCha8Rng::seed_from_u64(48);
    let cfg = PredicateConfig::default();
    let (mut yes, mut no) = (0, 0);
    for round in 0..12 {
        let side = [3.0, 4.0, 5.0][round % 3];
        let shapes = random_segments(&mut rng, 120, 2, side);
        let g = build_graph(&shapes, &cfg).unwrap();
        for delta in 2..=4 {
            let want = diameter_at_most(&g, delta);
            assert_eq!(segment_diam_at_most(&shapes, delta, 2).unwrap(), want);
            if want {
                yes += 1
            } else {
                no += 1
            }
        }
    }
    assert!(yes > 0 && no > 0, "yes {yes} no {no}");
}

#[test]
fn invalid_input_is_rejected() {
    let t = SlopeTable::default();
    let diag = Shape::segment(Point::new(0.0, 0.0), Point::new(1.0, 1.0), &t).unwrap();
    assert!(segment_diam_at_most(&[diag], 1, 2).is_err());
    let disk = Shape::UnitDisk { center: Point::new(0.0, 0.0) };
    assert!(segment_diam_at_most(&[disk], 1, 2).is_err());
    assert!(segment_diam_at_most(&[], 1, 2).is_err());
    assert!(ColorSequence::new(vec![], 2).is_err());
    assert!(ColorSequence::new(vec![3], 2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decision_equals_oracle(seed in any::<u64>(), n in 1usize..45, h in 1usize..=3, delta in 1u32..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shapes = random_segments(&mut rng, n, h, 4.0);
        let g = build_graph(&shapes, &PredicateConfig::default()).unwrap();
        prop_assert_eq!(segment_diam_at_most(&shapes, delta, h).unwrap(), diameter_at_most(&g, delta));
    }

    #[test]
    fn interval_reps_are_canonical(iv in proptest::collection::vec((0u32..60, 0u32..8), 0..12)) {
        let raw: Vec<(u32, u32)> = iv.iter().map(|&(l, w)| (l, l + w)).collect();
        let rep = IntervalRep::from_intervals(raw.clone());
        prop_assert!(rep.is_normalized());
        for p in 0..70 {
            prop_assert_eq!(rep.contains(p), raw.iter().any(|&(l, r)| l <= p && p <= r));
        }
        prop_assert_eq!(IntervalRep::from_positions(rep.positions()), rep);
    }
}
