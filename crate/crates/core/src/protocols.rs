//! Compute phase of a robot: pure functions from an observed snapshot and the
//! robot's own position to a movement decision.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::configuration::{
    classify_tag, detect_symmetry, make_cells, multiplicity_view, ConfigTag, Snapshot,
};
use crate::geometry::{
    ccw_delta, circle_through_point_with_tangent, normalize_angle, ArcPath, Line, Orientation,
    Path, Point, Segment,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("{0} multiplicity points observed; the protocol is undefined")]
    MultipleMultiplicities(usize),
    #[error("inadmissible configuration: symmetric {0:?}")]
    Inadmissible(ConfigTag),
    #[error("configuration is symmetric; no leader can be elected")]
    Symmetric,
    #[error("fix set must be a non-empty subset of the boundary")]
    BadFixInput,
    #[error("no boundary robot flanks the antipodal point")]
    MissingFlank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Style {
    Straight,
    Circular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extent {
    Full,
    Half,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveCommand {
    pub destination: Point,
    pub style: Style,
    pub extent: Extent,
    /// Starts at the robot; ends at `destination` for a full move and at the
    /// midpoint of the full path for a half move.
    pub path: Path,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decision {
    Stay,
    Move(MoveCommand),
}

impl Decision {
    pub fn command(&self) -> Option<&MoveCommand> {
        match self {
            Decision::Stay => None,
            Decision::Move(c) => Some(c),
        }
    }
}

/// Boundary robots that must not move so that the enclosing circle stays put.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixSet {
    pub members: Vec<Point>,
}

impl FixSet {
    pub fn contains(&self, p: Point, eps: f64) -> bool {
        self.members.iter().any(|m| m.approx_eq(p, eps))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    GatherK,
    AsyncGather,
    /// Demonstration protocol for two-multiplicity starts: robots head for
    /// the nearest multiplicity they are not part of.
    MultiplicityChase,
}

impl Protocol {
    pub fn decide(
        self,
        s: &Snapshot,
        self_pos: Point,
        n: usize,
        s_min: f64,
    ) -> Result<Decision, ProtocolError> {
        match self {
            Protocol::GatherK => gather_k(s, self_pos, s_min),
            Protocol::AsyncGather => async_gather(s, self_pos, n, s_min),
            Protocol::MultiplicityChase => multiplicity_chase(s, self_pos, s_min),
        }
    }
}

/// No other robot lies within tolerance of the open segment from `p` to
/// `dest`.
pub fn has_free_corridor(s: &Snapshot, p: Point, dest: Point) -> bool {
    let eps = s.eps();
    let seg = Segment::new(p, dest);
    s.positions()
        .iter()
        .filter(|q| !q.approx_eq(p, eps) && !q.approx_eq(dest, eps))
        .all(|q| seg.distance_to(*q) > eps)
}

fn arc_toward(p: Point, p_star: Point, tangent: &Line) -> Option<ArcPath> {
    let circle = circle_through_point_with_tangent(p, p_star, tangent).ok()?;
    // Leave p_star along the tangent direction that points to p's side; the
    // robot arrives travelling against it.
    let mut d = tangent.direction;
    if d.dot(p - p_star) < 0.0 {
        d = -d;
    }
    let ccw_tangent = (p_star - circle.center).perp();
    let orientation = if ccw_tangent.dot(d) < 0.0 {
        Orientation::Counterclockwise
    } else {
        Orientation::Clockwise
    };
    ArcPath::from_to(circle, p, p_star, orientation).ok()
}

/// Builds the path of a MoveToDest call.
pub fn move_to_dest(
    s: &Snapshot,
    p: Point,
    p_star: Point,
    style: Style,
    extent: Extent,
    s_min: f64,
) -> MoveCommand {
    let (style, full) = match style {
        Style::Straight => (Style::Straight, Path::Segment(Segment::new(p, p_star))),
        Style::Circular => {
            let tangent = find_tangent(s, p, p_star, s_min);
            match tangent.as_ref().and_then(|l| arc_toward(p, p_star, l)) {
                Some(arc) => (Style::Circular, Path::Arc(arc)),
                None => (Style::Straight, Path::Segment(Segment::new(p, p_star))),
            }
        }
    };
    let path = match extent {
        Extent::Full => full,
        Extent::Half => full.prefix(0.5 * full.length()),
    };
    MoveCommand { destination: p_star, style, extent, path }
}

/// The next robot beyond `p` on the ray from `p_star` through `p`.
fn next_on_ray(s: &Snapshot, p: Point, p_star: Point) -> Option<Point> {
    let eps = s.eps();
    let v = p - p_star;
    let dir = v.unit()?;
    let base = v.norm();
    s.positions()
        .iter()
        .copied()
        .filter(|q| {
            let w = *q - p_star;
            let along = w.dot(dir);
            along > base + eps && dir.cross(w).abs() <= eps
        })
        .min_by(|a, b| a.dist(p_star).total_cmp(&b.dist(p_star)).then(a.total_cmp(b)))
}

/// Tangent line at `p_star` for a robot at `p` whose straight path is
/// blocked. Returns `None` only when `p` coincides with `p_star`.
pub fn find_tangent(s: &Snapshot, p: Point, p_star: Point, s_min: f64) -> Option<Line> {
    if p.approx_eq(p_star, s.eps()) {
        return None;
    }
    match next_on_ray(s, p, p_star) {
        Some(outer) => {
            let l = find_tangent(s, outer, p_star, s_min)?;
            let Some(arc) = arc_toward(outer, p_star, &l) else {
                return Some(l);
            };
            if arc.length() < s_min {
                Some(l)
            } else {
                let moved = Path::Arc(arc).point_at_clamped(s_min);
                Line::through(p_star, moved).or(Some(l))
            }
        }
        None => Some(free_sector_bisector(s, p, p_star)),
    }
}

/// Bisector of the narrower robot-free angular sector about `p_star` next to
/// the ray through `p`.
fn free_sector_bisector(s: &Snapshot, p: Point, p_star: Point) -> Line {
    let eps = s.eps();
    let dir = (p - p_star).unit().expect("p differs from p_star");
    let alpha = dir.angle();
    let mut ccw = TAU;
    let mut cw = TAU;
    for q in s.positions() {
        let w = *q - p_star;
        if w.norm() <= eps {
            continue;
        }
        if dir.cross(w).abs() <= eps && dir.dot(w) > 0.0 {
            continue;
        }
        let d = ccw_delta(alpha, w.angle());
        if d > 0.0 {
            ccw = ccw.min(d);
            cw = cw.min(TAU - d);
        }
    }
    let ccw = ccw.min(PI);
    let cw = cw.min(PI);
    let up = normalize_angle(alpha + 0.5 * ccw);
    let down = normalize_angle(alpha - 0.5 * cw);
    let tol = 1e-12 * TAU;
    let bis = if (ccw - cw).abs() <= tol {
        up.min(down)
    } else if ccw < cw {
        up
    } else {
        down
    };
    Line::new(p_star, Point::from_polar(1.0, bis)).expect("unit direction")
}

/// A robot counts as already at its destination only when it is there up to
/// rounding; one merely within tolerance still makes the final short move, so
/// that robots cannot settle just outside each other's tolerance.
fn arrived(s: &Snapshot, p: Point, dest: Point) -> bool {
    p.approx_eq(dest, 1e-3 * s.eps())
}

fn approach(s: &Snapshot, p: Point, dest: Point, extent: Extent, s_min: f64) -> Decision {
    if arrived(s, p, dest) {
        return Decision::Stay;
    }
    let style = if has_free_corridor(s, p, dest) { Style::Straight } else { Style::Circular };
    Decision::Move(move_to_dest(s, p, dest, style, extent, s_min))
}

/// Synchronous gathering: head for the multiplicity point if there is one,
/// otherwise for the center of the enclosing circle.
pub fn gather_k(s: &Snapshot, self_pos: Point, s_min: f64) -> Result<Decision, ProtocolError> {
    let view = multiplicity_view(s);
    let mults: Vec<Point> = view.multiplicities().collect();
    let dest = match mults.len() {
        0 => s.sec().center,
        1 => mults[0],
        m => return Err(ProtocolError::MultipleMultiplicities(m)),
    };
    Ok(approach(s, self_pos, dest, Extent::Full, s_min))
}

/// Demonstration protocol for configurations with several multiplicities:
/// a robot moves straight to the nearest multiplicity it is not part of.
/// With at most one multiplicity it behaves like [`gather_k`].
pub fn multiplicity_chase(
    s: &Snapshot,
    self_pos: Point,
    s_min: f64,
) -> Result<Decision, ProtocolError> {
    let eps = s.eps();
    let mults: Vec<Point> = multiplicity_view(s).multiplicities().collect();
    if mults.len() < 2 {
        return gather_k(s, self_pos, s_min);
    }
    let target = mults
        .iter()
        .filter(|m| !m.approx_eq(self_pos, eps))
        .min_by(|a, b| a.dist(self_pos).total_cmp(&b.dist(self_pos)).then(a.total_cmp(b)))
        .copied()
        .expect("at least one other multiplicity");
    Ok(Decision::Move(move_to_dest(s, self_pos, target, Style::Straight, Extent::Full, s_min)))
}

fn angular_tol(s: &Snapshot) -> f64 {
    let r = s.sec().radius;
    if r > 0.0 {
        s.eps() / r
    } else {
        1e-9
    }
}

/// Largest cyclic gap between the given angles (`TAU` for a single angle).
fn max_gap(angles: &[f64]) -> (usize, f64) {
    let mut sorted: Vec<(usize, f64)> = angles.iter().copied().enumerate().collect();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1));
    let m = sorted.len();
    let mut best = (sorted[0].0, TAU);
    if m == 1 {
        return best;
    }
    best.1 = -1.0;
    for i in 0..m {
        let g = ccw_delta(sorted[i].1, sorted[(i + 1) % m].1);
        if g > best.1 {
            best = (sorted[i].0, g);
        }
    }
    best
}

/// Indices of the boundary robots nearest to angle `target` on its
/// clockwise and counterclockwise sides, or a single index if one sits on it.
fn flanking(angles: &[f64], target: f64, tol: f64) -> Result<Vec<usize>, ProtocolError> {
    if let Some(i) = angles.iter().position(|a| {
        let d = ccw_delta(target, *a);
        d <= tol || TAU - d <= tol
    }) {
        return Ok(vec![i]);
    }
    let after = (0..angles.len()).min_by(|&i, &j| {
        ccw_delta(target, angles[i]).total_cmp(&ccw_delta(target, angles[j]))
    });
    let before = (0..angles.len()).min_by(|&i, &j| {
        ccw_delta(angles[i], target).total_cmp(&ccw_delta(angles[j], target))
    });
    match (before, after) {
        (Some(b), Some(a)) if a != b => Ok(vec![b, a]),
        _ => Err(ProtocolError::MissingFlank),
    }
}

/// Smallest subset of `members` (by index order) whose angles do not fit in
/// an open semicircle.
fn pinning_subset(angles: &[f64], tol: f64) -> Vec<usize> {
    let m = angles.len();
    let pins = |idx: &[usize]| {
        let a: Vec<f64> = idx.iter().map(|&i| angles[i]).collect();
        max_gap(&a).1 <= PI + tol
    };
    for i in 0..m {
        for j in (i + 1)..m {
            if pins(&[i, j]) {
                return vec![i, j];
            }
        }
    }
    for i in 0..m {
        for j in (i + 1)..m {
            for k in (j + 1)..m {
                if pins(&[i, j, k]) {
                    return vec![i, j, k];
                }
            }
        }
    }
    (0..m).collect()
}

/// Chooses boundary robots whose enclosing circle is that of the whole
/// configuration, starting from the set `f`.
pub fn fix_sec(f: &[Point], s: &Snapshot) -> Result<FixSet, ProtocolError> {
    let eps = s.eps();
    let tol = angular_tol(s);
    let sec = s.sec();
    let boundary = s.boundary();
    let angles: Vec<f64> = boundary.iter().map(|b| (*b - sec.center).angle()).collect();
    let mut chosen: Vec<usize> = Vec::new();
    for p in f {
        let i = boundary
            .iter()
            .position(|b| b.approx_eq(*p, eps))
            .ok_or(ProtocolError::BadFixInput)?;
        if !chosen.contains(&i) {
            chosen.push(i);
        }
    }
    if chosen.is_empty() {
        return Err(ProtocolError::BadFixInput);
    }
    chosen.sort_unstable();
    let f_angles: Vec<f64> = chosen.iter().map(|&i| angles[i]).collect();
    let (gap_start, gap) = max_gap(&f_angles);
    let mut members: Vec<usize> = if gap > PI + tol {
        if chosen.len() == 1 {
            let i = chosen[0];
            let mut out = vec![i];
            out.extend(flanking(&angles, angles[i] + PI, tol)?);
            out
        } else {
            // The members span the arc that starts right after the largest
            // gap; its two ends are the farthest pair.
            let first = chosen[(gap_start + 1) % chosen.len()];
            let last = chosen[gap_start];
            let (a0, a1) = (angles[first], angles[last]);
            let mid = a0 + 0.5 * ccw_delta(a0, a1);
            let mut out = vec![first, last];
            out.extend(flanking(&angles, mid + PI, tol)?);
            out
        }
    } else if chosen.len() > 4 {
        let sub = pinning_subset(&f_angles, tol);
        sub.into_iter().map(|j| chosen[j]).collect()
    } else {
        chosen
    };
    members.sort_unstable();
    members.dedup();
    Ok(FixSet { members: members.into_iter().map(|i| boundary[i]).collect() })
}

/// Float sequences compared lexicographically with a tolerance.
fn cmp_signature(a: &[f64], b: &[f64], tol: f64) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > tol {
            return x.total_cmp(y);
        }
    }
    a.len().cmp(&b.len())
}

/// Traversal signature of the configuration starting at boundary robot `i`.
/// Each boundary gap contributes its angle, the number of interior robots
/// in it and their (angular offset, normalised radius) pairs.
fn signature(
    angles: &[f64],
    interior: &[(f64, f64)],
    i: usize,
    ccw: bool,
    tol: f64,
) -> Vec<f64> {
    let k = angles.len();
    let mut out = Vec::new();
    for step in 0..k {
        let (from, to) = if ccw {
            (angles[(i + step) % k], angles[(i + step + 1) % k])
        } else {
            (angles[(i + k - step % k) % k], angles[(i + 2 * k - step - 1) % k])
        };
        let gap = if ccw { ccw_delta(from, to) } else { ccw_delta(to, from) };
        let gap = if gap <= tol { TAU } else { gap };
        let mut inside: Vec<(f64, f64)> = interior
            .iter()
            .filter_map(|&(a, rho)| {
                let mut off = if ccw { ccw_delta(from, a) } else { ccw_delta(a, from) };
                if TAU - off <= tol {
                    off = 0.0;
                }
                (off < gap - tol || (off < gap && k == 1)).then_some((off, rho))
            })
            .collect();
        inside.sort_by(|a, b| cmp_signature(&[a.0, a.1], &[b.0, b.1], tol));
        out.push(gap);
        out.push(inside.len() as f64);
        for (off, rho) in inside {
            out.push(off);
            out.push(rho);
        }
    }
    out
}

/// Deterministic leader among the boundary robots of an asymmetric
/// configuration; invariant under similarity transforms of the input.
pub fn elect_leader(s: &Snapshot) -> Result<Point, ProtocolError> {
    if detect_symmetry(s) {
        return Err(ProtocolError::Symmetric);
    }
    let sec = s.sec();
    let eps = s.eps();
    let tol = angular_tol(s).max(1e-12);
    let boundary = s.boundary();
    let angles: Vec<f64> = boundary.iter().map(|b| (*b - sec.center).angle()).collect();
    let r = sec.radius;
    // A robot at the center looks the same from every boundary robot and
    // carries no information for the ordering.
    let interior: Vec<(f64, f64)> = s
        .positions()
        .iter()
        .filter(|p| !boundary.contains(p))
        .map(|p| *p - sec.center)
        .filter(|v| v.norm() > eps)
        .map(|v| (v.angle(), v.norm() / r))
        .collect();
    let keys: Vec<Vec<f64>> = (0..boundary.len())
        .map(|i| {
            let a = signature(&angles, &interior, i, true, tol);
            let b = signature(&angles, &interior, i, false, tol);
            if cmp_signature(&b, &a, tol) == Ordering::Less {
                b
            } else {
                a
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&i, &j| cmp_signature(&keys[i], &keys[j], tol));
    if order.len() > 1 && cmp_signature(&keys[order[0]], &keys[order[1]], tol) == Ordering::Equal {
        return Err(ProtocolError::Symmetric);
    }
    Ok(boundary[order[0]])
}

/// What the asynchronous protocol prescribes for the configuration as a
/// whole, before any robot-specific choice.
#[derive(Debug, Clone, PartialEq)]
pub struct AsyncPlan {
    pub destination: Point,
    pub fixed: FixSet,
    pub tag: ConfigTag,
    /// Boundary count exceeds half of the robots, so cells are in use.
    pub cell_mode: bool,
    /// Observations about the plan that are worth surfacing but not fatal.
    pub findings: Vec<String>,
}

pub fn async_plan(s: &Snapshot, n: usize) -> Result<AsyncPlan, ProtocolError> {
    let mults: Vec<Point> = multiplicity_view(s).multiplicities().collect();
    match mults.len() {
        0 => {}
        1 => {
            return Ok(AsyncPlan {
                destination: mults[0],
                fixed: FixSet { members: Vec::new() },
                tag: ConfigTag::Mult,
                cell_mode: false,
                findings: Vec::new(),
            })
        }
        m => return Err(ProtocolError::MultipleMultiplicities(m)),
    }
    let center = s.sec().center;
    let boundary = s.boundary();
    let k = boundary.len();
    let tag = classify_tag(s, n);
    let plan = |fixed, cell_mode, findings| AsyncPlan {
        destination: center,
        fixed,
        tag,
        cell_mode,
        findings,
    };
    if 2 * k <= n {
        return Ok(plan(FixSet { members: boundary }, false, Vec::new()));
    }
    let Ok(cells) = make_cells(s) else {
        return Ok(plan(FixSet { members: Vec::new() }, false, Vec::new()));
    };
    if cells.all_equal() {
        let leader = elect_leader(s).map_err(|_| ProtocolError::Inadmissible(tag))?;
        return Ok(plan(fix_sec(&[leader], s)?, true, Vec::new()));
    }
    let top = cells.max_occupancy();
    let f: Vec<Point> = cells.cells.iter().filter(|c| c.occupancy == top).map(|c| c.owner).collect();
    let mut findings = Vec::new();
    let fixed = if 2 * f.len() <= k {
        fix_sec(&f, s)?
    } else {
        let rest: Vec<Point> = boundary.iter().copied().filter(|b| !f.contains(b)).collect();
        let fixed = fix_sec(&rest, s)?;
        let clash = fixed.members.iter().filter(|m| f.contains(m)).count();
        if clash > 0 {
            findings.push(format!(
                "fix set for the complement of the argmax cells includes {clash} argmax robot(s)"
            ));
        }
        fixed
    };
    Ok(plan(fixed, true, findings))
}

/// Whether `p` lies on the bisector of the gap between its two neighbouring
/// boundary robots (itself excluded).
fn on_neighbour_bisector(s: &Snapshot, p: Point) -> bool {
    let eps = s.eps();
    let center = s.sec().center;
    let v = p - center;
    if v.norm() <= eps {
        return false;
    }
    let others: Vec<f64> = s
        .boundary()
        .iter()
        .filter(|b| !b.approx_eq(p, eps))
        .map(|b| (*b - center).angle())
        .collect();
    if others.len() < 2 {
        return false;
    }
    let a = v.angle();
    let before = others
        .iter()
        .copied()
        .min_by(|x, y| ccw_delta(*x, a).total_cmp(&ccw_delta(*y, a)))
        .unwrap();
    let after = others
        .iter()
        .copied()
        .min_by(|x, y| ccw_delta(a, *x).total_cmp(&ccw_delta(a, *y)))
        .unwrap();
    let gap = ccw_delta(before, after);
    let gap = if gap == 0.0 { TAU } else { gap };
    let dir = Point::from_polar(1.0, before + 0.5 * gap);
    dir.dot(v) > 0.0 && dir.cross(v).abs() <= eps
}

/// Asynchronous gathering with a pinned enclosing circle.
pub fn async_gather(
    s: &Snapshot,
    self_pos: Point,
    n: usize,
    s_min: f64,
) -> Result<Decision, ProtocolError> {
    let eps = s.eps();
    let plan = async_plan(s, n)?;
    let dest = plan.destination;
    if plan.fixed.contains(self_pos, eps) || arrived(s, self_pos, dest) {
        return Ok(Decision::Stay);
    }
    if plan.tag == ConfigTag::Mult || !plan.cell_mode {
        return Ok(approach(s, self_pos, dest, Extent::Full, s_min));
    }
    let blocked = !has_free_corridor(s, self_pos, dest);
    let style = if blocked || on_neighbour_bisector(s, self_pos) {
        Style::Circular
    } else {
        Style::Straight
    };
    let extent = if !s.contains(dest) {
        let after = s.with_moved(self_pos, dest);
        match make_cells(&after) {
            Ok(c) if c.all_equal() => Extent::Half,
            _ => Extent::Full,
        }
    } else {
        Extent::Full
    };
    Ok(Decision::Move(move_to_dest(s, self_pos, dest, style, extent, s_min)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snap(coords: &[(f64, f64)]) -> Snapshot {
        Snapshot::from_xy(coords).unwrap()
    }

    fn polar(r: f64, deg: f64) -> (f64, f64) {
        let a = deg.to_radians();
        (r * a.cos(), r * a.sin())
    }

    #[test]
    fn three_free_robots_go_straight_to_center() {
        let s = snap(&[(0.0, 0.0), (4.0, 0.0), (2.0, 3.0)]);
        let o = s.sec().center;
        for p in s.positions() {
            let d = gather_k(&s, *p, 0.1).unwrap();
            let c = d.command().unwrap();
            assert_eq!(c.style, Style::Straight);
            assert_eq!(c.extent, Extent::Full);
            assert!(c.path.end().approx_eq(o, 1e-12));
        }
    }

    #[test]
    fn robot_at_multiplicity_stays() {
        let s = snap(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0), (0.0, 2.0)]);
        assert_eq!(gather_k(&s, Point::new(0.0, 0.0), 0.1).unwrap(), Decision::Stay);
        let c = gather_k(&s, Point::new(1.0, 0.0), 0.1).unwrap();
        assert_eq!(c.command().unwrap().destination, Point::new(0.0, 0.0));
    }

    #[test]
    fn two_multiplicities_are_an_error() {
        let s = snap(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0), (1.0, 0.0)]);
        assert_eq!(
            gather_k(&s, Point::new(0.0, 0.0), 0.1),
            Err(ProtocolError::MultipleMultiplicities(2))
        );
    }

    #[test]
    fn blocked_robot_bends_around() {
        // (2,0) is hidden behind (1,0) on the way to the SEC center (0,0).
        let s = snap(&[(2.0, 0.0), (1.0, 0.0), (-2.0, 0.0), (0.0, 1.5)]);
        assert!(s.sec().center.approx_eq(Point::new(0.0, 0.0), 1e-12));
        let c = gather_k(&s, Point::new(2.0, 0.0), 0.1).unwrap();
        let c = c.command().unwrap().clone();
        assert_eq!(c.style, Style::Circular);
        assert!(c.path.start().approx_eq(Point::new(2.0, 0.0), 1e-12));
        assert!(c.path.end().approx_eq(Point::new(0.0, 0.0), 1e-12));
        let inner = gather_k(&s, Point::new(1.0, 0.0), 0.1).unwrap();
        assert_eq!(inner.command().unwrap().style, Style::Straight);
        assert!(!crate::geometry::paths_intersect(
            &c.path,
            &inner.command().unwrap().path,
            &[Point::new(0.0, 0.0)]
        ));
    }

    #[test]
    fn base_case_bisects_the_narrower_free_sector() {
        // Free sectors next to the ray at 0°: 60° counterclockwise, 90° clockwise.
        let s = snap(&[(2.0, 0.0), (1.0, 0.0), polar(2.0, 60.0), polar(2.0, -90.0), polar(2.0, 180.0)]);
        let o = Point::new(0.0, 0.0);
        let l = find_tangent(&s, Point::new(2.0, 0.0), o, 0.1).unwrap();
        let ang = normalize_angle(l.direction.angle());
        assert!((ang - 30f64.to_radians()).abs() < 1e-12, "{}", ang.to_degrees());
    }

    #[test]
    fn half_extent_stops_at_midpoint() {
        let s = snap(&[(0.0, 0.0), (4.0, 0.0)]);
        let c = move_to_dest(&s, Point::new(4.0, 0.0), Point::new(2.0, 0.0), Style::Straight, Extent::Half, 0.1);
        assert!(c.path.end().approx_eq(Point::new(3.0, 0.0), 1e-12));
        assert_eq!(c.destination, Point::new(2.0, 0.0));
    }

    #[test]
    fn fix_sec_diameter_pair_is_kept() {
        let s = snap(&[(1.0, 0.0), (-1.0, 0.0), (0.0, 0.5), (0.2, -0.3)]);
        let f = fix_sec(&[Point::new(1.0, 0.0), Point::new(-1.0, 0.0)], &s).unwrap();
        assert_eq!(f.members.len(), 2);
    }

    #[test]
    fn fix_sec_hexagon_singleton_takes_antipode() {
        let coords: Vec<(f64, f64)> = (0..6).map(|i| polar(1.0, 60.0 * i as f64)).collect();
        let s = snap(&coords);
        let p = Point::new(1.0, 0.0);
        let f = fix_sec(&[p], &s).unwrap();
        assert_eq!(f.members.len(), 2);
        assert!(f.contains(Point::new(-1.0, 0.0), 1e-9));
    }

    #[test]
    fn fix_sec_rejects_interior_points() {
        let s = snap(&[(1.0, 0.0), (-1.0, 0.0), (0.0, 0.5)]);
        assert_eq!(fix_sec(&[Point::new(0.0, 0.5)], &s), Err(ProtocolError::BadFixInput));
        assert_eq!(fix_sec(&[], &s), Err(ProtocolError::BadFixInput));
    }

    #[test]
    fn leader_rejects_symmetric_input() {
        let coords: Vec<(f64, f64)> = (0..5).map(|i| polar(1.0, 72.0 * i as f64)).collect();
        assert_eq!(elect_leader(&snap(&coords)), Err(ProtocolError::Symmetric));
    }

    #[test]
    fn leader_is_rotation_invariant() {
        let base = [polar(1.0, 0.0), polar(1.0, 80.0), polar(1.0, 150.0), polar(1.0, 250.0), polar(0.3, 20.0)];
        let rot: Vec<(f64, f64)> = base.iter().map(|&(x, y)| (-y, x)).collect();
        let a = elect_leader(&snap(&base)).unwrap();
        let b = elect_leader(&snap(&rot)).unwrap();
        assert!(Point::new(-a.y, a.x).approx_eq(b, 1e-9));
    }

    #[test]
    fn async_small_boundary_fixes_it() {
        // triangle boundary, four interior robots, n = 7
        let mut coords = vec![polar(1.0, 0.0), polar(1.0, 120.0), polar(1.0, 240.0)];
        coords.extend([polar(0.5, 10.0), polar(0.4, 100.0), polar(0.6, 200.0), polar(0.3, 300.0)]);
        let s = snap(&coords);
        for p in s.positions() {
            let d = async_gather(&s, *p, 7, 0.05).unwrap();
            if (p.norm() - 1.0).abs() < 1e-9 {
                assert_eq!(d, Decision::Stay);
            } else {
                let c = d.command().unwrap();
                assert_eq!((c.style, c.extent), (Style::Straight, Extent::Full));
            }
        }
    }

    #[test]
    fn async_with_multiplicity_unfixes_everyone() {
        let mut coords = vec![polar(1.0, 0.0), polar(1.0, 120.0), polar(1.0, 240.0)];
        coords.extend([(0.2, 0.1), (0.2, 0.1), polar(0.6, 200.0), polar(0.3, 300.0)]);
        let s = snap(&coords);
        let plan = async_plan(&s, 7).unwrap();
        assert!(plan.fixed.members.is_empty());
        let d = async_gather(&s, Point::from_polar(1.0, 0.0), 7, 0.05).unwrap();
        assert_eq!(d.command().unwrap().destination, Point::new(0.2, 0.1));
    }

    #[test]
    fn symmetric_degenerate_class_is_inadmissible() {
        let mut coords: Vec<(f64, f64)> = (0..6).map(|i| polar(1.0, 60.0 * i as f64)).collect();
        coords.push((0.0, 0.0));
        let s = snap(&coords);
        assert_eq!(
            async_gather(&s, Point::new(1.0, 0.0), 7, 0.05),
            Err(ProtocolError::Inadmissible(ConfigTag::C1k))
        );
    }
}
