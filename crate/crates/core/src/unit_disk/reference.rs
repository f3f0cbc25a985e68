//! Brute-force references for flowers and their boundaries.
//!
//! Everything here works directly on disk centers without any auxiliary
//! structure and is meant for validating the implicit machinery.

use std::f64::consts::TAU;

use super::envelope::{crossing_angles, radial};
use crate::geometry::Point;

/// Indices of the disks (radius `rho`) containing `p`.
pub fn flower_disks(centers: &[Point], p: Point, rho: f64) -> Vec<usize> {
    (0..centers.len()).filter(|&i| centers[i].dist(p) <= rho).collect()
}

/// True when some disk contains both `p` and `q`, i.e. `q` lies in the
/// flower of `p`.
pub fn in_flower(centers: &[Point], p: Point, q: Point, rho: f64) -> bool {
    centers.iter().any(|c| c.dist(p) <= rho && c.dist(q) <= rho)
}

/// All-pairs test: every `q` of `pts_b` lies in the flower of every `p` of
/// `pts_a`.
pub fn cell_pair(pts_a: &[Point], pts_b: &[Point], centers: &[Point], rho: f64) -> bool {
    pts_a
        .iter()
        .all(|&p| pts_b.iter().all(|&q| in_flower(centers, p, q, rho)))
}

/// Radial function of the flower of `p` seen from `o` (all disks of the
/// flower must contain `o`); `None` when no disk contains `p`.
pub fn flower_radial(centers: &[Point], p: Point, o: Point, rho: f64, theta: f64) -> Option<f64> {
    centers
        .iter()
        .filter(|c| c.dist(p) <= rho)
        .map(|&c| radial(c, o, rho, theta))
        .reduce(f64::max)
}

/// Number of crossings between the boundaries of the flowers of `p` and
/// `q` seen from `o`: the cyclic count of sign changes of the difference of
/// their radial functions, sampled between all circle–circle crossing
/// angles. Maximal stretches where the boundaries coincide count as one
/// crossing if the sign differs on their two sides and as none otherwise.
pub fn crossing_count(centers: &[Point], p: Point, q: Point, o: Point, rho: f64) -> usize {
    let mut relevant: Vec<Point> = centers
        .iter()
        .copied()
        .filter(|c| c.dist(p) <= rho || c.dist(q) <= rho)
        .collect();
    relevant.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    relevant.dedup();
    let mut cuts = vec![0.0];
    for i in 0..relevant.len() {
        for j in i + 1..relevant.len() {
            let (k, a) = crossing_angles(relevant[i], relevant[j], o, rho);
            cuts.extend_from_slice(&a[..k]);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.push(TAU);
    let mut signs: Vec<i8> = Vec::new();
    for w in cuts.windows(2) {
        if w[1] - w[0] < 1e-12 {
            continue;
        }
        let th = 0.5 * (w[0] + w[1]);
        let (Some(rp), Some(rq)) = (flower_radial(centers, p, o, rho, th), flower_radial(centers, q, o, rho, th)) else {
            return 0;
        };
        let d = rp - rq;
        if d.abs() > 1e-10 {
            signs.push(if d > 0.0 { 1 } else { -1 });
        }
    }
    if signs.is_empty() {
        return 0;
    }
    let n = signs.len();
    (0..n).filter(|&i| signs[i] != signs[(i + 1) % n]).count()
}

/// Walks the ray from `y` in direction `theta` through the union of the
/// disks (radius `rho`) centered at `centers`. Returns the number of
/// boundary points of the union met at positive distance and the distance
/// at which the ray leaves the connected piece containing `y` (0 when `y`
/// is outside the union).
pub fn ray_boundary(centers: &[Point], y: Point, theta: f64, rho: f64) -> (usize, f64) {
    let u = Point::from_angle(theta);
    let mut iv: Vec<(f64, f64)> = centers
        .iter()
        .filter_map(|&c| {
            let w = y.sub(c);
            let b = u.dot(w);
            let disc = b * b - (w.dot(w) - rho * rho);
            if disc < 0.0 {
                return None;
            }
            let s = disc.sqrt();
            let (t0, t1) = (-b - s, -b + s);
            (t1 >= 0.0).then_some((t0, t1))
        })
        .collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in iv {
        match merged.last_mut() {
            Some(last) if a <= last.1 + 1e-12 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    let mut count = 0;
    let mut exit = 0.0;
    for &(a, b) in &merged {
        if a > 0.0 {
            count += 1;
        } else {
            exit = b;
        }
        if b > 0.0 {
            count += 1;
        }
    }
    (count, exit)
}
