//! Continuous-plane primitives: points, circles, movement paths and the
//! smallest enclosing circle.
//!
//! All coincidence and on-circle tests go through [`eps_geo`], a tolerance
//! relative to the scale of the configuration.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative geometric tolerance.
pub const EPS_REL: f64 = 1e-9;

/// Seed for the shuffle inside [`smallest_enclosing_circle`].
const SEC_SHUFFLE_SEED: u64 = 0x5EC0_5EC0;

/// Absolute tolerance for a configuration of the given scale (usually the
/// radius of its smallest enclosing circle).
#[inline]
pub fn eps_geo(scale: f64) -> f64 {
    EPS_REL * (1.0 + scale.abs())
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("empty point set")]
    Empty,
    #[error("non-finite coordinate ({0}, {1})")]
    NonFinite(f64, f64),
    #[error("point lies on the tangent line; the tangent circle degenerates to a line")]
    DegenerateTangent,
    #[error("point ({x}, {y}) is off the circle by {offset}")]
    OffCircle { x: f64, y: f64, offset: f64 },
    #[error("arc endpoints coincide")]
    DegenerateArc,
    #[error("distance {distance} outside path of length {length}")]
    OutOfRange { distance: f64, length: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub fn new(x: f64, y: f64) -> Self {
        debug_assert!(x.is_finite() && y.is_finite(), "non-finite point ({x}, {y})");
        Point { x, y }
    }

    pub fn try_new(x: f64, y: f64) -> Result<Self, GeometryError> {
        if x.is_finite() && y.is_finite() {
            Ok(Point { x, y })
        } else {
            Err(GeometryError::NonFinite(x, y))
        }
    }

    #[inline]
    pub fn from_polar(radius: f64, angle: f64) -> Self {
        Point::new(radius * angle.cos(), radius * angle.sin())
    }

    #[inline]
    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Counterclockwise angle from +x, in `[0, 2π)`.
    #[inline]
    pub fn angle(self) -> f64 {
        normalize_angle(self.y.atan2(self.x))
    }

    /// Rotated by +90°.
    #[inline]
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn rotate(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn unit(self) -> Option<Point> {
        let n = self.norm();
        (n > 0.0).then(|| self / n)
    }

    #[inline]
    pub fn lerp(self, o: Point, t: f64) -> Point {
        Point::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }

    #[inline]
    pub fn midpoint(self, o: Point) -> Point {
        Point::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    #[inline]
    pub fn approx_eq(self, o: Point, eps: f64) -> bool {
        self.dist(o) <= eps
    }

    /// Lexicographic total order on (x, y).
    pub fn total_cmp(&self, o: &Point) -> Ordering {
        self.x.total_cmp(&o.x).then(self.y.total_cmp(&o.y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl TryFrom<[f64; 2]> for Point {
    type Error = GeometryError;
    fn try_from(v: [f64; 2]) -> Result<Self, Self::Error> {
        Point::try_new(v[0], v[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Div<f64> for Point {
    type Output = Point;
    #[inline]
    fn div(self, s: f64) -> Point {
        Point::new(self.x / s, self.y / s)
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Maps any angle into `[0, 2π)`.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Counterclockwise angular distance from `from` to `to`, in `[0, 2π)`.
#[inline]
pub fn ccw_delta(from: f64, to: f64) -> f64 {
    normalize_angle(to - from)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point, radius: f64) -> Self {
        debug_assert!(radius >= 0.0 && radius.is_finite());
        Circle { center, radius }
    }

    pub fn from_diameter(a: Point, b: Point) -> Self {
        let center = a.midpoint(b);
        Circle::new(center, center.dist(a).max(center.dist(b)))
    }

    /// Circumcircle of three points, or `None` when they are collinear.
    pub fn circumscribe(a: Point, b: Point, c: Point) -> Option<Self> {
        let ab = b - a;
        let ac = c - a;
        let d = 2.0 * ab.cross(ac);
        let scale = ab.norm2().max(ac.norm2());
        if d.abs() <= 1e-14 * scale {
            return None;
        }
        let ux = (ac.y * ab.norm2() - ab.y * ac.norm2()) / d;
        let uy = (ab.x * ac.norm2() - ac.x * ab.norm2()) / d;
        let center = a + Point::new(ux, uy);
        if !center.x.is_finite() || !center.y.is_finite() {
            return None;
        }
        let radius = center.dist(a).max(center.dist(b)).max(center.dist(c));
        Some(Circle::new(center, radius))
    }

    #[inline]
    pub fn eps(&self) -> f64 {
        eps_geo(self.radius)
    }

    #[inline]
    pub fn contains(&self, p: Point, eps: f64) -> bool {
        self.center.dist(p) <= self.radius + eps
    }

    #[inline]
    pub fn on_boundary(&self, p: Point, eps: f64) -> bool {
        (self.center.dist(p) - self.radius).abs() <= eps
    }

    #[inline]
    pub fn point_at_angle(&self, angle: f64) -> Point {
        self.center + Point::from_polar(self.radius, angle)
    }

    pub fn approx_eq(&self, o: &Circle, eps: f64) -> bool {
        self.center.approx_eq(o.center, eps) && (self.radius - o.radius).abs() <= eps
    }
}

/// Infinite line through `point` with unit `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub point: Point,
    pub direction: Point,
}

impl Line {
    /// Line through `point` with direction `direction` (normalised here).
    pub fn new(point: Point, direction: Point) -> Option<Self> {
        direction.unit().map(|direction| Line { point, direction })
    }

    pub fn through(a: Point, b: Point) -> Option<Self> {
        Line::new(a, b - a)
    }

    pub fn distance_to(&self, p: Point) -> f64 {
        self.direction.cross(p - self.point).abs()
    }

    /// Unit normal, the direction rotated by +90°.
    pub fn normal(&self) -> Point {
        self.direction.perp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Clockwise,
    Counterclockwise,
}

impl Orientation {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Clockwise => -1.0,
            Orientation::Counterclockwise => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub from: Point,
    pub to: Point,
}

impl Segment {
    pub fn new(from: Point, to: Point) -> Self {
        Segment { from, to }
    }

    /// Zero-length path that keeps a robot where it is.
    pub fn stay(at: Point) -> Self {
        Segment { from: at, to: at }
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.from.dist(self.to)
    }

    fn point_at_unchecked(&self, distance: f64) -> Point {
        let len = self.length();
        if len == 0.0 || distance <= 0.0 {
            self.from
        } else if distance >= len {
            self.to
        } else {
            self.from.lerp(self.to, distance / len)
        }
    }

    /// Distance from `p` to the closed segment.
    pub fn distance_to(&self, p: Point) -> f64 {
        let d = self.to - self.from;
        let len2 = d.norm2();
        if len2 == 0.0 {
            return p.dist(self.from);
        }
        let t = ((p - self.from).dot(d) / len2).clamp(0.0, 1.0);
        p.dist(self.from.lerp(self.to, t))
    }
}

/// Circular arc travelled from `start` by a signed angle `sweep` about
/// `circle.center` (positive sweeps are counterclockwise).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcPath {
    pub circle: Circle,
    pub start_angle: f64,
    pub sweep: f64,
    pub start: Point,
    pub end: Point,
}

impl ArcPath {
    /// Arc on `circle` from `from` to `to` in the given orientation. The
    /// endpoints are stored verbatim so the path starts and ends exactly at
    /// them.
    pub fn from_to(
        circle: Circle,
        from: Point,
        to: Point,
        orientation: Orientation,
    ) -> Result<Self, GeometryError> {
        let eps = circle.eps();
        for p in [from, to] {
            let offset = (circle.center.dist(p) - circle.radius).abs();
            if offset > eps.max(1e-9 * circle.radius) {
                return Err(GeometryError::OffCircle { x: p.x, y: p.y, offset });
            }
        }
        if from.approx_eq(to, eps) || circle.radius == 0.0 {
            return Err(GeometryError::DegenerateArc);
        }
        let a0 = (from - circle.center).angle();
        let a1 = (to - circle.center).angle();
        let sweep = match orientation {
            Orientation::Counterclockwise => ccw_delta(a0, a1),
            Orientation::Clockwise => -ccw_delta(a1, a0),
        };
        if sweep == 0.0 {
            return Err(GeometryError::DegenerateArc);
        }
        Ok(ArcPath { circle, start_angle: a0, sweep, start: from, end: to })
    }

    #[inline]
    pub fn end_angle(&self) -> f64 {
        normalize_angle(self.start_angle + self.sweep)
    }

    #[inline]
    pub fn orientation(&self) -> Orientation {
        if self.sweep >= 0.0 {
            Orientation::Counterclockwise
        } else {
            Orientation::Clockwise
        }
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.circle.radius * self.sweep.abs()
    }

    fn point_at_unchecked(&self, distance: f64) -> Point {
        let len = self.length();
        if distance <= 0.0 {
            self.start
        } else if distance >= len {
            self.end
        } else {
            let a = self.start_angle + self.sweep.signum() * distance / self.circle.radius;
            self.circle.point_at_angle(a)
        }
    }

    /// Whether `q` (assumed on the circle) falls within the angular range,
    /// with an angular slack of `ang_tol`.
    fn covers_angle(&self, q: Point, ang_tol: f64) -> bool {
        let a = (q - self.circle.center).angle();
        let rel = if self.sweep >= 0.0 {
            ccw_delta(self.start_angle, a)
        } else {
            ccw_delta(a, self.start_angle)
        };
        rel <= self.sweep.abs() + ang_tol || rel >= TAU - ang_tol
    }
}

/// Chooses the arc of `circle` from `a` to `b` whose angular span (seen from
/// the center) contains the direction of `side_hint`.
pub fn arc_between(
    circle: Circle,
    a: Point,
    b: Point,
    side_hint: Point,
) -> Result<ArcPath, GeometryError> {
    let ccw = ArcPath::from_to(circle, a, b, Orientation::Counterclockwise)?;
    let hint = side_hint - circle.center;
    let on_ccw = hint.norm() > 0.0 && ccw_delta(ccw.start_angle, hint.angle()) <= ccw.sweep;
    if on_ccw {
        Ok(ccw)
    } else {
        ArcPath::from_to(circle, a, b, Orientation::Clockwise)
    }
}

/// A movement trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Path {
    Segment(Segment),
    Arc(ArcPath),
}

impl Path {
    pub fn stay(at: Point) -> Self {
        Path::Segment(Segment::stay(at))
    }

    pub fn length(&self) -> f64 {
        match self {
            Path::Segment(s) => s.length(),
            Path::Arc(a) => a.length(),
        }
    }

    pub fn start(&self) -> Point {
        match self {
            Path::Segment(s) => s.from,
            Path::Arc(a) => a.start,
        }
    }

    pub fn end(&self) -> Point {
        match self {
            Path::Segment(s) => s.to,
            Path::Arc(a) => a.end,
        }
    }

    pub fn is_stay(&self) -> bool {
        matches!(self, Path::Segment(s) if s.from == s.to)
    }

    /// Point at arc-length `distance` from the start.
    pub fn point_at(&self, distance: f64) -> Result<Point, GeometryError> {
        let length = self.length();
        let slack = eps_geo(length);
        if !(distance >= -slack && distance <= length + slack) {
            return Err(GeometryError::OutOfRange { distance, length });
        }
        Ok(self.point_at_clamped(distance))
    }

    /// Like [`Path::point_at`] but clamps `distance` into the path.
    pub fn point_at_clamped(&self, distance: f64) -> Point {
        match self {
            Path::Segment(s) => s.point_at_unchecked(distance),
            Path::Arc(a) => a.point_at_unchecked(distance),
        }
    }

    /// The initial piece of this path of length `distance`.
    pub fn prefix(&self, distance: f64) -> Path {
        let len = self.length();
        if distance >= len {
            return *self;
        }
        let distance = distance.max(0.0);
        let end = self.point_at_clamped(distance);
        match self {
            Path::Segment(s) => Path::Segment(Segment::new(s.from, end)),
            Path::Arc(a) => {
                if distance == 0.0 {
                    return Path::stay(a.start);
                }
                Path::Arc(ArcPath {
                    circle: a.circle,
                    start_angle: a.start_angle,
                    sweep: a.sweep.signum() * distance / a.circle.radius,
                    start: a.start,
                    end,
                })
            }
        }
    }

    fn extent(&self) -> f64 {
        match self {
            Path::Segment(s) => s.from.norm().max(s.to.norm()),
            Path::Arc(a) => a.circle.center.norm() + a.circle.radius,
        }
    }
}

/// Whether two trajectories share a point that is not within the geometric
/// tolerance of one of `exclude`.
pub fn paths_intersect(p1: &Path, p2: &Path, exclude: &[Point]) -> bool {
    let scale = p1.extent().max(p2.extent()).max(p1.length()).max(p2.length());
    let eps = eps_geo(scale);
    let excluded = |q: &Point| exclude.iter().any(|e| e.approx_eq(*q, eps));
    match intersect(p1, p2, eps, scale) {
        Contact::None => false,
        Contact::Overlap => true,
        Contact::Points(pts) => pts.iter().any(|q| !excluded(q)),
    }
}

enum Contact {
    None,
    Points(Vec<Point>),
    Overlap,
}

fn intersect(p1: &Path, p2: &Path, eps: f64, scale: f64) -> Contact {
    match (p1, p2) {
        (Path::Segment(a), Path::Segment(b)) => seg_seg(a, b, eps),
        (Path::Segment(s), Path::Arc(a)) | (Path::Arc(a), Path::Segment(s)) => {
            seg_arc(s, a, eps, scale)
        }
        (Path::Arc(a), Path::Arc(b)) => arc_arc(a, b, eps, scale),
    }
}

fn seg_seg(a: &Segment, b: &Segment, eps: f64) -> Contact {
    if a.length() <= eps {
        return if b.distance_to(a.from) <= eps {
            Contact::Points(vec![a.from])
        } else {
            Contact::None
        };
    }
    if b.length() <= eps {
        return if a.distance_to(b.from) <= eps {
            Contact::Points(vec![b.from])
        } else {
            Contact::None
        };
    }
    let da = a.to - a.from;
    let db = b.to - b.from;
    let denom = da.cross(db);
    let la = da.norm();
    let lb = db.norm();
    if denom.abs() <= 1e-12 * la * lb {
        // Parallel: only collinear overlaps matter.
        let line = Line::through(a.from, a.to).expect("non-degenerate segment");
        if line.distance_to(b.from) > eps {
            return Contact::None;
        }
        let dir = line.direction;
        let (a0, a1) = (0.0f64, la);
        let t0 = (b.from - a.from).dot(dir);
        let t1 = (b.to - a.from).dot(dir);
        let lo = a0.max(t0.min(t1));
        let hi = a1.min(t0.max(t1));
        return if hi - lo > eps {
            Contact::Overlap
        } else if hi - lo >= -eps {
            Contact::Points(vec![a.from + dir * (0.5 * (lo + hi))])
        } else {
            Contact::None
        };
    }
    let w = b.from - a.from;
    let t = w.cross(db) / denom;
    let u = w.cross(da) / denom;
    let tt = eps / la;
    let tu = eps / lb;
    if t >= -tt && t <= 1.0 + tt && u >= -tu && u <= 1.0 + tu {
        Contact::Points(vec![a.from + da * t.clamp(0.0, 1.0)])
    } else {
        Contact::None
    }
}

/// Squared half-chord below which two curves are treated as tangent.
fn tangency_slack(eps: f64, scale: f64) -> f64 {
    1e-3 * eps * (1.0 + scale)
}

fn seg_arc(s: &Segment, a: &ArcPath, eps: f64, scale: f64) -> Contact {
    let ang_tol = eps / a.circle.radius.max(eps);
    if s.length() <= eps {
        let on = a.circle.on_boundary(s.from, eps) && a.covers_angle(s.from, ang_tol);
        return if on { Contact::Points(vec![s.from]) } else { Contact::None };
    }
    let line = Line::through(s.from, s.to).expect("non-degenerate segment");
    let c = a.circle.center;
    let t_foot = (c - line.point).dot(line.direction);
    let foot = line.point + line.direction * t_foot;
    let d2 = foot.dist(c).powi(2);
    let h2 = a.circle.radius.powi(2) - d2;
    let candidates = if h2 < -tangency_slack(eps, scale) {
        vec![]
    } else if h2 <= tangency_slack(eps, scale) {
        vec![foot]
    } else {
        let h = h2.sqrt();
        vec![foot + line.direction * h, foot - line.direction * h]
    };
    let pts: Vec<Point> = candidates
        .into_iter()
        .filter(|q| s.distance_to(*q) <= eps && a.covers_angle(*q, ang_tol))
        .collect();
    if pts.is_empty() {
        Contact::None
    } else {
        Contact::Points(pts)
    }
}

fn arc_arc(a: &ArcPath, b: &ArcPath, eps: f64, scale: f64) -> Contact {
    let (ca, cb) = (a.circle, b.circle);
    let ang_a = eps / ca.radius.max(eps);
    let ang_b = eps / cb.radius.max(eps);
    if ca.approx_eq(&cb, eps) {
        // Same circle: overlapping angular ranges or touching endpoints.
        let mut touch = Vec::new();
        for q in [a.start, a.end] {
            if b.covers_angle(q, ang_b) {
                touch.push(q);
            }
        }
        for q in [b.start, b.end] {
            if a.covers_angle(q, ang_a) {
                touch.push(q);
            }
        }
        if touch.is_empty() {
            return Contact::None;
        }
        let mid_a = a.point_at_unchecked(0.5 * a.length());
        let mid_b = b.point_at_unchecked(0.5 * b.length());
        if b.covers_angle(mid_a, -ang_b) || a.covers_angle(mid_b, -ang_a) {
            return Contact::Overlap;
        }
        // Distinct touch points on a shared circle mean the arcs overlap
        // along a stretch between them.
        let spread = touch.iter().any(|p| !p.approx_eq(touch[0], eps));
        return if spread { Contact::Overlap } else { Contact::Points(touch) };
    }
    let d = ca.center.dist(cb.center);
    if d <= eps {
        return Contact::None; // concentric, different radii
    }
    let x = (d * d + ca.radius * ca.radius - cb.radius * cb.radius) / (2.0 * d);
    let h2 = ca.radius * ca.radius - x * x;
    let axis = (cb.center - ca.center) / d;
    let foot = ca.center + axis * x;
    let candidates = if h2 < -tangency_slack(eps, scale) {
        vec![]
    } else if h2 <= tangency_slack(eps, scale) {
        vec![foot]
    } else {
        let h = h2.sqrt();
        vec![foot + axis.perp() * h, foot - axis.perp() * h]
    };
    let pts: Vec<Point> = candidates
        .into_iter()
        .filter(|q| a.covers_angle(*q, ang_a) && b.covers_angle(*q, ang_b))
        .collect();
    if pts.is_empty() {
        Contact::None
    } else {
        Contact::Points(pts)
    }
}

/// Smallest circle enclosing all `points`.
///
/// Randomised incremental construction over a canonically ordered copy of
/// the input, shuffled with a fixed seed, so the result depends only on the
/// multiset of points.
pub fn smallest_enclosing_circle(points: &[Point]) -> Result<Circle, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::Empty);
    }
    if let Some(p) = points.iter().find(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err(GeometryError::NonFinite(p.x, p.y));
    }
    let mut pts = points.to_vec();
    pts.sort_by(Point::total_cmp);
    pts.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(SEC_SHUFFLE_SEED);
    pts.shuffle(&mut rng);

    let spread = pts
        .iter()
        .map(|p| p.x.abs().max(p.y.abs()))
        .fold(0.0_f64, f64::max);
    let eps = 0.25 * eps_geo(spread);

    let mut c = Circle::new(pts[0], 0.0);
    for i in 1..pts.len() {
        if c.contains(pts[i], eps) {
            continue;
        }
        c = Circle::new(pts[i], 0.0);
        for j in 0..i {
            if c.contains(pts[j], eps) {
                continue;
            }
            c = Circle::from_diameter(pts[i], pts[j]);
            for k in 0..j {
                if c.contains(pts[k], eps) {
                    continue;
                }
                c = Circle::circumscribe(pts[i], pts[j], pts[k])
                    .unwrap_or_else(|| widest_pair_circle(pts[i], pts[j], pts[k]));
            }
        }
    }
    Ok(c)
}

fn widest_pair_circle(a: Point, b: Point, c: Point) -> Circle {
    let cands = [(a, b), (a, c), (b, c)];
    let (p, q) = cands
        .into_iter()
        .max_by(|x, y| x.0.dist(x.1).total_cmp(&y.0.dist(y.1)))
        .expect("three candidates");
    Circle::from_diameter(p, q)
}

/// The points lying on the boundary of `sec`, ordered by counterclockwise
/// angle about its center (ties broken by position).
pub fn boundary_points(points: &[Point], sec: &Circle) -> Vec<Point> {
    let eps = sec.eps();
    let mut on: Vec<(f64, Point)> = points
        .iter()
        .filter(|p| sec.on_boundary(**p, eps))
        .map(|p| ((*p - sec.center).angle(), *p))
        .collect();
    on.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    on.into_iter().map(|(_, p)| p).collect()
}

/// Circle through `p` and `p_star` that touches `tangent` at `p_star`.
///
/// `tangent` must pass through `p_star`. When `p` itself lies on the tangent
/// line no such circle exists and [`GeometryError::DegenerateTangent`] is
/// returned; callers fall back to a straight path.
pub fn circle_through_point_with_tangent(
    p: Point,
    p_star: Point,
    tangent: &Line,
) -> Result<Circle, GeometryError> {
    let v = p - p_star;
    let len2 = v.norm2();
    let normal = tangent.normal();
    let off = normal.dot(v);
    if len2 == 0.0 || off.abs() <= 1e-9 * len2.sqrt() {
        return Err(GeometryError::DegenerateTangent);
    }
    let t = len2 / (2.0 * off);
    let center = p_star + normal * t;
    if !center.x.is_finite() || !center.y.is_finite() {
        return Err(GeometryError::DegenerateTangent);
    }
    Ok(Circle::new(center, t.abs()))
}

/// Smallest of the two angles between directions `a` and `b`, in `[0, π]`.
pub fn angle_between(a: Point, b: Point) -> f64 {
    let d = ccw_delta(a.angle(), b.angle());
    if d > PI {
        TAU - d
    } else {
        d
    }
}
