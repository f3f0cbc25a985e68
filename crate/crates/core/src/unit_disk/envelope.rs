//! Polar upper envelopes of equal-radius circles around a common origin.
//!
//! Every circle considered here contains the origin `o`, so its boundary is
//! described by a radial function `r(θ)`: the distance from `o` to the
//! boundary along direction `θ`. A union of such disks is star-shaped from
//! `o` with radial function the pointwise maximum; an intersection has the
//! pointwise minimum.

use std::f64::consts::TAU;

use crate::geometry::Point;

/// Relative tolerance below which two radial values count as equal.
pub(crate) const RADIAL_TOL: f64 = 1e-12;

/// Radial distance from `o` to the boundary of the disk of radius `rho`
/// centered at `c`, along direction `theta`. Requires `o` inside the disk
/// (slightly outside is clamped).
#[inline]
pub fn radial(c: Point, o: Point, rho: f64, theta: f64) -> f64 {
    let w = c.sub(o);
    let (s, co) = theta.sin_cos();
    let b = w.x * co + w.y * s;
    let disc = rho * rho - w.dot(w) + b * b;
    b + disc.max(0.0).sqrt()
}

/// Angles in `[0, 2π)` around `o` of the intersection points of the two
/// circles of radius `rho` centered at `c1` and `c2`. Returns the number of
/// angles written (0, 1 or 2); coincident centers give 0.
pub fn crossing_angles(c1: Point, c2: Point, o: Point, rho: f64) -> (usize, [f64; 2]) {
    let d = c2.sub(c1);
    let dd = d.norm();
    if dd == 0.0 || dd > 2.0 * rho {
        return (0, [0.0; 2]);
    }
    let m = c1.midpoint(c2);
    let h = (rho * rho - dd * dd / 4.0).max(0.0).sqrt();
    let perp = Point::new(-d.y / dd, d.x / dd);
    let a1 = m.add(perp.scale(h)).sub(o).angle().rem_euclid(TAU);
    if h == 0.0 {
        return (1, [a1, 0.0]);
    }
    let a2 = m.sub(perp.scale(h)).sub(o).angle().rem_euclid(TAU);
    (2, [a1, a2])
}

/// The disks that envelopes refer to: centers, common origin and radius.
#[derive(Clone, Copy, Debug)]
pub struct Circles<'a> {
    /// Disk centers, indexed by disk id.
    pub centers: &'a [Point],
    /// Common origin contained in every disk.
    pub origin: Point,
    /// Common radius.
    pub rho: f64,
}

impl Circles<'_> {
    /// Radial function of disk `d` at absolute angle `theta`.
    #[inline]
    pub fn radial(&self, d: u32, theta: f64) -> f64 {
        radial(self.centers[d as usize], self.origin, self.rho, theta)
    }
}

/// Piecewise description of a radial function over a parameter interval.
///
/// The parameter `s` maps to the absolute angle `base + s`; piece `i` covers
/// `[breaks[i], breaks[i+1]]` and is the arc of disk `disks[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Envelope {
    /// Angle of parameter 0.
    pub base: f64,
    /// Piece boundaries, strictly increasing; `len = disks.len() + 1`.
    pub breaks: Vec<f64>,
    /// Disk id per piece; neighbors always differ.
    pub disks: Vec<u32>,
}

impl Envelope {
    /// A single arc over `[s0, s1]`.
    pub fn single(disk: u32, base: f64, s0: f64, s1: f64) -> Self {
        Envelope {
            base,
            breaks: vec![s0, s1],
            disks: vec![disk],
        }
    }

    /// Index of the piece containing parameter `s` (clamped to the domain).
    pub fn locate(&self, s: f64) -> usize {
        let i = self.breaks.partition_point(|&b| b <= s);
        i.saturating_sub(1).min(self.disks.len() - 1)
    }

    /// Radial value and disk at parameter `s`.
    pub fn eval(&self, s: f64, circles: &Circles) -> (f64, u32) {
        let d = self.disks[self.locate(s)];
        (circles.radial(d, self.base + s), d)
    }

    /// Domain `[start, end]`.
    pub fn domain(&self) -> (f64, f64) {
        (self.breaks[0], *self.breaks.last().expect("nonempty envelope"))
    }

    /// Parameters of genuine vertices (where the contributing disk changes).
    /// For a full-circle envelope the seam at 0 counts when the first and
    /// last pieces differ.
    pub fn vertices(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.breaks[1..self.breaks.len() - 1].to_vec();
        let (s0, s1) = self.domain();
        let full = (s1 - s0 - TAU).abs() < 1e-12;
        if full && self.disks.len() > 1 && self.disks[0] != *self.disks.last().unwrap() {
            v.insert(0, s0);
        }
        v
    }

    fn push(&mut self, s0: f64, s1: f64, d: u32) {
        if s1 <= s0 {
            return;
        }
        if self.disks.last() == Some(&d) {
            *self.breaks.last_mut().unwrap() = s1;
        } else {
            if self.breaks.is_empty() {
                self.breaks.push(s0);
            } else {
                *self.breaks.last_mut().unwrap() = s0;
            }
            self.breaks.push(s1);
            self.disks.push(d);
        }
    }
}

/// Sign of `x - y` on one piece of an overlay.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    /// `x` strictly larger.
    Greater,
    /// `x` strictly smaller.
    Less,
    /// Equal within tolerance (shared boundary or tangency).
    Equal,
}

/// Walks the common refinement of two envelopes on the same domain, split
/// further at crossings of the two active circles, and reports every piece
/// with both active disks and their radial values at the piece midpoint.
fn overlay(x: &Envelope, y: &Envelope, circles: &Circles, mut emit: impl FnMut(f64, f64, u32, u32, f64, f64)) {
    let base = x.base;
    let (start, end) = x.domain();
    let (mut i, mut j) = (0usize, 0usize);
    let mut cur = start;
    while cur < end && i < x.disks.len() && j < y.disks.len() {
        let nx = x.breaks[i + 1].min(y.breaks[j + 1]).min(end);
        let (dx, dy) = (x.disks[i], y.disks[j]);
        let mut cuts = [cur, 0.0, 0.0, nx];
        let mut m = 1;
        if dx != dy && nx > cur {
            let (k, angles) = crossing_angles(circles.centers[dx as usize], circles.centers[dy as usize], circles.origin, circles.rho);
            let mut inside: Vec<f64> = angles[..k]
                .iter()
                .map(|a| (a - base).rem_euclid(TAU))
                .filter(|&s| s > cur && s < nx)
                .collect();
            inside.sort_by(f64::total_cmp);
            for s in inside {
                cuts[m] = s;
                m += 1;
            }
        }
        cuts[m] = nx;
        for w in cuts[..=m].windows(2) {
            let (a, b) = (w[0], w[1]);
            if b > a {
                let mid = base + 0.5 * (a + b);
                emit(a, b, dx, dy, circles.radial(dx, mid), circles.radial(dy, mid));
            }
        }
        cur = nx;
        if x.breaks[i + 1] <= nx {
            i += 1;
        }
        if y.breaks[j + 1] <= nx {
            j += 1;
        }
    }
}

/// Pointwise maximum of two envelopes with the same base and domain.
pub fn merge_max(x: &Envelope, y: &Envelope, circles: &Circles) -> Envelope {
    let mut out = Envelope {
        base: x.base,
        breaks: Vec::new(),
        disks: Vec::new(),
    };
    overlay(x, y, circles, |a, b, dx, dy, rx, ry| {
        let d = if dx == dy || rx >= ry { dx } else { dy };
        out.push(a, b, d);
    });
    if out.disks.is_empty() {
        // Degenerate zero-length domain.
        return x.clone();
    }
    out
}

/// Pieces `(s0, s1, sign of x − y)` over the common domain, with equal
/// neighbors merged.
pub fn compare(x: &Envelope, y: &Envelope, circles: &Circles) -> Vec<(f64, f64, Cmp)> {
    let mut out: Vec<(f64, f64, Cmp)> = Vec::new();
    overlay(x, y, circles, |a, b, dx, dy, rx, ry| {
        let c = if dx == dy || (rx - ry).abs() <= RADIAL_TOL * rx.abs().max(1.0) {
            Cmp::Equal
        } else if rx > ry {
            Cmp::Greater
        } else {
            Cmp::Less
        };
        match out.last_mut() {
            Some(last) if last.2 == c => last.1 = b,
            _ => out.push((a, b, c)),
        }
    });
    out
}

/// Upper envelope of the given disks over `[s0, s1]` (parameter relative to
/// `base`), by incremental merging.
pub fn envelope_of(disks: &[u32], base: f64, s0: f64, s1: f64, circles: &Circles) -> Option<Envelope> {
    let mut it = disks.iter();
    let mut env = Envelope::single(*it.next()?, base, s0, s1);
    for &d in it {
        env = merge_max(&env, &Envelope::single(d, base, s0, s1), circles);
    }
    Some(env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn radial_of_centered_disk_is_radius() {
        let o = Point::new(0.0, 0.0);
        assert!((radial(o, o, 1.0, 0.3) - 1.0).abs() < 1e-15);
        assert!((radial(Point::new(0.1, 0.0), o, 1.0, 0.0) - 1.1).abs() < 1e-15);
    }

    #[test]
    fn merged_envelope_is_pointwise_max() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let o = Point::new(0.0, 0.0);
            let centers: Vec<Point> = (0..12)
                .map(|_| Point::from_angle(rng.gen_range(0.0..TAU)).scale(rng.gen_range(0.0..0.99)))
                .collect();
            let circles = Circles {
                centers: &centers,
                origin: o,
                rho: 1.0,
            };
            let ids: Vec<u32> = (0..12).collect();
            let env = envelope_of(&ids, 0.0, 0.0, TAU, &circles).unwrap();
            for w in env.disks.windows(2) {
                assert_ne!(w[0], w[1]);
            }
            for k in 0..500 {
                let th = k as f64 / 500.0 * TAU + 1e-4;
                let want = ids.iter().map(|&d| circles.radial(d, th)).fold(0.0, f64::max);
                let (got, _) = env.eval(th, &circles);
                assert!((got - want).abs() < 1e-9, "{got} vs {want}");
            }
        }
    }

    #[test]
    fn compare_signs_match_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let o = Point::new(0.0, 0.0);
        let centers: Vec<Point> = (0..10)
            .map(|_| Point::from_angle(rng.gen_range(0.0..TAU)).scale(rng.gen_range(0.0..0.9)))
            .collect();
        let circles = Circles {
            centers: &centers,
            origin: o,
            rho: 1.0,
        };
        let a = envelope_of(&[0, 1, 2, 3, 4, 5], 1.0, 0.0, 2.0, &circles).unwrap();
        let b = envelope_of(&[3, 4, 6, 7, 8, 9], 1.0, 0.0, 2.0, &circles).unwrap();
        for (s0, s1, c) in compare(&a, &b, &circles) {
            let s = 0.5 * (s0 + s1);
            let d = a.eval(s, &circles).0 - b.eval(s, &circles).0;
            match c {
                Cmp::Greater => assert!(d > 0.0),
                Cmp::Less => assert!(d < 0.0),
                Cmp::Equal => assert!(d.abs() < 1e-9),
            }
        }
    }
}
