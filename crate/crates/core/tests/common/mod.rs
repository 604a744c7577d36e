//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::f64::consts::TAU;

use crashgather::geometry::Point;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Smallest enclosing circle by exhaustive search over pairs and triples.
pub fn sec_oracle(pts: &[Point]) -> (Point, f64) {
    if pts.len() == 1 {
        return (pts[0], 0.0);
    }
    let covers = |c: Point, r: f64| pts.iter().all(|p| p.dist(c) <= r * (1.0 + 1e-12) + 1e-12);
    let mut best: Option<(Point, f64)> = None;
    let mut offer = |c: Point, r: f64| {
        if best.is_none_or(|(_, b)| r < b) && covers(c, r) {
            best = Some((c, r));
        }
    };
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let c = (pts[i] + pts[j]) * 0.5;
            offer(c, pts[i].dist(c));
            for k in j + 1..pts.len() {
                if let Some((c, r)) = circumcircle(pts[i], pts[j], pts[k]) {
                    offer(c, r);
                }
            }
        }
    }
    best.expect("some candidate covers every point")
}

fn circumcircle(a: Point, b: Point, c: Point) -> Option<(Point, f64)> {
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if d.abs() < 1e-14 {
        return None;
    }
    let (a2, b2, c2) = (a.x * a.x + a.y * a.y, b.x * b.x + b.y * b.y, c.x * c.x + c.y * c.y);
    let ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    let uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    let center = Point::new(ux, uy);
    Some((center, center.dist(a)))
}

/// Leader by explicit canonicalisation: for every boundary robot and both
/// handednesses, move the configuration into the frame where that robot
/// sits at angle zero on the unit circle, read off the traversal and keep
/// the lexicographically smallest.
pub fn leader_oracle(pts: &[Point]) -> Point {
    let (center, r) = sec_oracle(pts);
    let tol = 1e-9;
    let polar: Vec<(f64, f64)> = pts
        .iter()
        .map(|p| {
            let v = *p - center;
            (v.y.atan2(v.x), v.norm() / r)
        })
        .collect();
    let on_circle = |rho: f64| (rho - 1.0).abs() <= 1e-9;
    let mut best: Option<(Vec<f64>, usize)> = None;
    for (i, &(a0, rho0)) in polar.iter().enumerate() {
        if !on_circle(rho0) {
            continue;
        }
        for mirror in [false, true] {
            let canon = |a: f64| {
                let d = if mirror { a0 - a } else { a - a0 };
                d.rem_euclid(TAU)
            };
            let mut boundary: Vec<f64> =
                polar.iter().filter(|(_, rho)| on_circle(*rho)).map(|&(a, _)| canon(a)).collect();
            boundary.sort_by(f64::total_cmp);
            let interior: Vec<(f64, f64)> = polar
                .iter()
                .filter(|(_, rho)| !on_circle(*rho) && *rho > 1e-9)
                .map(|&(a, rho)| (canon(a), rho))
                .collect();
            let mut key = Vec::new();
            for (j, &from) in boundary.iter().enumerate() {
                let to = boundary.get(j + 1).copied().unwrap_or(TAU);
                let mut inside: Vec<(f64, f64)> = interior
                    .iter()
                    .filter(|(a, _)| *a >= from && *a < to)
                    .map(|&(a, rho)| (a - from, rho))
                    .collect();
                inside.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
                key.push(to - from);
                key.push(inside.len() as f64);
                for (off, rho) in inside {
                    key.push(off);
                    key.push(rho);
                }
            }
            let smaller = match &best {
                None => true,
                Some((b, _)) => lex_less(&key, b, tol),
            };
            if smaller {
                best = Some((key, i));
            }
        }
    }
    pts[best.expect("at least two boundary robots").1]
}

fn lex_less(a: &[f64], b: &[f64], tol: f64) -> bool {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > tol {
            return x < y;
        }
    }
    a.len() < b.len()
}

pub fn random_disc(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point> {
    (0..n)
        .map(|_| loop {
            let p = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if p.norm() <= 1.0 {
                break p;
            }
        })
        .collect()
}

/// Random similarity transform, reflections included.
#[derive(Debug, Clone, Copy)]
pub struct Similarity {
    pub angle: f64,
    pub scale: f64,
    pub shift: Point,
    pub mirror: bool,
}

impl Similarity {
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        Similarity {
            angle: rng.gen_range(0.0..TAU),
            scale: 10f64.powf(rng.gen_range(-2.0..2.0)),
            shift: Point::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0)),
            mirror: rng.gen_bool(0.5),
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        let q = if self.mirror { Point::new(p.x, -p.y) } else { p };
        let (s, c) = self.angle.sin_cos();
        Point::new(c * q.x - s * q.y, s * q.x + c * q.y) * self.scale + self.shift
    }
}
