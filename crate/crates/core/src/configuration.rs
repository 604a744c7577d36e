//! Robot configurations as seen in one look: weak multiplicity detection,
//! the cell decomposition of the enclosing circle and the configuration
//! taxonomy used by the asynchronous protocol.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::OnceLock;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    boundary_points, ccw_delta, eps_geo, smallest_enclosing_circle, Circle, Point,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("a snapshot needs at least one robot")]
    Empty,
    #[error("non-finite robot position ({0}, {1})")]
    NonFinite(f64, f64),
    #[error("cells need at least two boundary robots, found {0}")]
    TooFewBoundary(usize),
    #[error("cells are undefined for a configuration with a multiplicity point")]
    HasMultiplicity,
}

/// Positions of all robots at one look instant.
///
/// Stored in canonical (lexicographic) order so that every derived quantity
/// is independent of how the robots were listed.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct Snapshot {
    positions: Vec<Point>,
    #[serde(skip)]
    sec: OnceLock<Circle>,
}

impl Snapshot {
    pub fn new(mut positions: Vec<Point>) -> Result<Self, ConfigError> {
        if positions.is_empty() {
            return Err(ConfigError::Empty);
        }
        if let Some(p) = positions.iter().find(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(ConfigError::NonFinite(p.x, p.y));
        }
        positions.sort_by(Point::total_cmp);
        Ok(Snapshot { positions, sec: OnceLock::new() })
    }

    pub fn from_xy(coords: &[(f64, f64)]) -> Result<Self, ConfigError> {
        Snapshot::new(coords.iter().map(|&(x, y)| Point { x, y }).collect())
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn sec(&self) -> Circle {
        *self
            .sec
            .get_or_init(|| smallest_enclosing_circle(&self.positions).expect("non-empty snapshot"))
    }

    /// Geometric tolerance for this configuration.
    pub fn eps(&self) -> f64 {
        eps_geo(self.sec().radius)
    }

    /// Robots on the enclosing circle, angle-sorted about its center.
    pub fn boundary(&self) -> Vec<Point> {
        boundary_points(&self.positions, &self.sec())
    }

    pub fn contains(&self, p: Point) -> bool {
        let eps = self.eps();
        self.positions.iter().any(|q| q.approx_eq(p, eps))
    }

    /// Copy with one robot at `from` relocated to `to`.
    pub fn with_moved(&self, from: Point, to: Point) -> Snapshot {
        let eps = self.eps();
        let mut positions = self.positions.clone();
        if let Some(slot) = positions.iter_mut().find(|q| q.approx_eq(from, eps)) {
            *slot = to;
        }
        Snapshot::new(positions).expect("relocation keeps the snapshot valid")
    }

    pub fn multiplicity_view(&self) -> MultiplicityView {
        multiplicity_view(self)
    }
}

impl PartialEq for Snapshot {
    fn eq(&self, other: &Self) -> bool {
        self.positions == other.positions
    }
}

impl fmt::Debug for Snapshot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Snapshot").field(&self.positions).finish()
    }
}

impl TryFrom<Vec<Point>> for Snapshot {
    type Error = ConfigError;
    fn try_from(v: Vec<Point>) -> Result<Self, Self::Error> {
        Snapshot::new(v)
    }
}

impl From<Snapshot> for Vec<Point> {
    fn from(s: Snapshot) -> Self {
        s.positions
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Occupancy {
    Single,
    Multiple,
}

/// Occupied locations with weak multiplicity flags. Counts beyond "more than
/// one" are deliberately not available.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityView {
    pub locations: Vec<(Point, Occupancy)>,
}

impl MultiplicityView {
    pub fn multiplicities(&self) -> impl Iterator<Item = Point> + '_ {
        self.locations
            .iter()
            .filter(|(_, o)| *o == Occupancy::Multiple)
            .map(|(p, _)| *p)
    }

    pub fn multiplicity_count(&self) -> usize {
        self.multiplicities().count()
    }

    pub fn occupied(&self) -> usize {
        self.locations.len()
    }
}

/// Groups positions that coincide within `eps` (transitively). Returns the
/// groups as index lists ordered by their smallest member.
pub(crate) fn coincidence_classes(points: &[Point], eps: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if points[i].approx_eq(points[j], eps) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

pub fn multiplicity_view(s: &Snapshot) -> MultiplicityView {
    let pts = s.positions();
    let locations = coincidence_classes(pts, s.eps())
        .into_iter()
        .map(|g| {
            // Positions are sorted, so the first member is the canonical
            // representative of its class.
            let flag = if g.len() > 1 { Occupancy::Multiple } else { Occupancy::Single };
            (pts[g[0]], flag)
        })
        .collect();
    MultiplicityView { locations }
}

/// At most one multiplicity point.
pub fn is_legal(s: &Snapshot) -> bool {
    multiplicity_view(s).multiplicity_count() <= 1
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    /// The boundary robot this cell belongs to.
    pub owner: Point,
    /// Angle of the bounding ray on the clockwise side.
    pub from_ray: f64,
    /// Angle of the bounding ray on the counterclockwise side.
    pub to_ray: f64,
    #[serde(serialize_with = "ser_ratio")]
    pub occupancy: Rational64,
}

fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellDecomposition {
    pub sec: Circle,
    pub boundary: Vec<Point>,
    pub cells: Vec<Cell>,
    /// Number of interior robots at the center (each shared by all cells).
    pub at_center: usize,
}

impl CellDecomposition {
    pub fn k(&self) -> usize {
        self.boundary.len()
    }

    pub fn all_equal(&self) -> bool {
        self.cells.windows(2).all(|w| w[0].occupancy == w[1].occupancy)
    }

    pub fn max_occupancy(&self) -> Rational64 {
        self.cells.iter().map(|c| c.occupancy).max().unwrap_or_default()
    }

    pub fn total(&self) -> Rational64 {
        self.cells.iter().map(|c| c.occupancy).sum()
    }

    /// Angles of the rays separating consecutive cells; ray `i` lies between
    /// cell `i` and cell `i + 1`.
    pub fn rays(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.to_ray).collect()
    }
}

/// Splits the enclosing circle into one cell per boundary robot, bounded by
/// the rays through the midpoints of the arcs to its neighbours, and counts
/// interior robots per cell. Robots on a separating ray are shared by the
/// two cells; a robot at the center is shared by all of them.
pub fn make_cells(s: &Snapshot) -> Result<CellDecomposition, ConfigError> {
    if multiplicity_view(s).multiplicity_count() > 0 {
        return Err(ConfigError::HasMultiplicity);
    }
    let sec = s.sec();
    let eps = s.eps();
    let boundary = s.boundary();
    let k = boundary.len();
    if k < 2 {
        return Err(ConfigError::TooFewBoundary(k));
    }
    let angles: Vec<f64> = boundary.iter().map(|p| (*p - sec.center).angle()).collect();
    // ray[i] separates cell i and cell i+1
    let rays: Vec<f64> = (0..k)
        .map(|i| {
            let gap = ccw_delta(angles[i], angles[(i + 1) % k]);
            let gap = if gap == 0.0 { TAU } else { gap };
            angles[i] + 0.5 * gap
        })
        .collect();
    let mut occ = vec![Rational64::from_integer(0); k];
    let mut at_center = 0;
    let kk = k as i64;
    for q in s.positions() {
        if boundary.iter().any(|b| b == q) {
            continue;
        }
        let v = *q - sec.center;
        if v.norm() <= eps {
            at_center += 1;
            for o in occ.iter_mut() {
                *o += Rational64::new(1, kk);
            }
            continue;
        }
        let on_ray = (0..k).find(|&i| {
            let dir = Point::from_polar(1.0, rays[i]);
            v.dot(dir) > 0.0 && dir.cross(v).abs() <= eps
        });
        if let Some(i) = on_ray {
            occ[i] += Rational64::new(1, 2);
            occ[(i + 1) % k] += Rational64::new(1, 2);
            continue;
        }
        let a = v.angle();
        let cell = (0..k)
            .find(|&i| {
                let lo = rays[(i + k - 1) % k];
                let span = ccw_delta(lo, rays[i]);
                let span = if span == 0.0 { TAU } else { span };
                ccw_delta(lo, a) < span
            })
            .unwrap_or(0);
        occ[cell] += Rational64::from_integer(1);
    }
    let cells = (0..k)
        .map(|i| Cell {
            owner: boundary[i],
            from_ray: crate::geometry::normalize_angle(rays[(i + k - 1) % k]),
            to_ray: crate::geometry::normalize_angle(rays[i]),
            occupancy: occ[i],
        })
        .collect();
    Ok(CellDecomposition { sec, boundary, cells, at_center })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConfigTag {
    /// At least one multiplicity point.
    Mult,
    /// No multiplicity; cells allow the enclosing circle to be pinned.
    Cell,
    /// All robots on the boundary.
    C0,
    /// One robot at the center, the rest on the boundary.
    C1k,
    /// Every cell shares half a robot with a neighbour.
    C12,
    /// `C12` plus a robot at the center.
    C12plus1k,
}

impl ConfigTag {
    /// The equal-occupancy classes that may only appear initially.
    pub fn is_degenerate(self) -> bool {
        matches!(self, ConfigTag::C0 | ConfigTag::C1k | ConfigTag::C12 | ConfigTag::C12plus1k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigClass {
    pub tag: ConfigTag,
    pub symmetric: bool,
}

impl ConfigClass {
    /// Symmetric equal-occupancy configurations admit no leader.
    pub fn is_admissible(&self) -> bool {
        !(self.tag.is_degenerate() && self.symmetric)
    }
}

/// Class tag without the symmetry flag.
pub fn classify_tag(s: &Snapshot, n: usize) -> ConfigTag {
    if multiplicity_view(s).multiplicity_count() > 0 {
        return ConfigTag::Mult;
    }
    let Ok(cells) = make_cells(s) else {
        return ConfigTag::Cell;
    };
    let k = cells.k();
    if 2 * k <= n || !cells.all_equal() {
        return ConfigTag::Cell;
    }
    let v = cells.cells[0].occupancy;
    let base = v - Rational64::new(cells.at_center as i64, k as i64);
    let zero = Rational64::from_integer(0);
    let half = Rational64::new(1, 2);
    match (cells.at_center, base) {
        (0, b) if b == zero => ConfigTag::C0,
        (1, b) if b == zero => ConfigTag::C1k,
        (0, b) if b == half => ConfigTag::C12,
        (1, b) if b == half => ConfigTag::C12plus1k,
        _ => ConfigTag::Cell,
    }
}

pub fn classify(s: &Snapshot, n: usize) -> ConfigClass {
    ConfigClass { tag: classify_tag(s, n), symmetric: detect_symmetry(s) }
}

/// Robots sharing one ray from the center, with radii normalised by the
/// enclosing radius.
#[derive(Debug, Clone)]
struct Ray {
    angle: f64,
    radii: Vec<f64>,
}

fn rays_about_center(s: &Snapshot) -> (Vec<Ray>, f64, f64) {
    let sec = s.sec();
    let eps = s.eps();
    let r = sec.radius.max(f64::MIN_POSITIVE);
    let mut pts: Vec<(f64, Point)> = s
        .positions()
        .iter()
        .map(|p| *p - sec.center)
        .filter(|v| v.norm() > eps)
        .map(|v| (v.angle(), v))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rays: Vec<(Point, Ray)> = Vec::new();
    for (a, v) in pts {
        let joined = rays.last_mut().and_then(|(dir, ray)| {
            (dir.cross(v).abs() <= eps && dir.dot(v) > 0.0).then_some(ray)
        });
        match joined {
            Some(ray) => ray.radii.push(v.norm() / r),
            None => {
                rays.push((v / v.norm(), Ray { angle: a, radii: vec![v.norm() / r] }))
            }
        }
    }
    if rays.len() > 1 {
        let (first_dir, _) = rays[0].clone();
        let (last_dir, _) = rays.last().unwrap().clone();
        if first_dir.cross(last_dir).abs() <= eps / r && first_dir.dot(last_dir) > 0.0 {
            let (_, last) = rays.pop().unwrap();
            rays[0].1.radii.extend(last.radii);
        }
    }
    let mut rays: Vec<Ray> = rays.into_iter().map(|(_, r)| r).collect();
    for ray in &mut rays {
        ray.radii.sort_by(f64::total_cmp);
    }
    (rays, eps / r, eps / r)
}

/// Whether some nontrivial rotation about the enclosing circle's center, or
/// a reflection in a line through it, maps the configuration to itself.
pub fn detect_symmetry(s: &Snapshot) -> bool {
    let (rays, ang_tol, rad_tol) = rays_about_center(s);
    let m = rays.len();
    if m == 0 {
        return true;
    }
    let gaps: Vec<f64> = (0..m)
        .map(|j| {
            let g = ccw_delta(rays[j].angle, rays[(j + 1) % m].angle);
            if m == 1 || g == 0.0 {
                TAU
            } else {
                g
            }
        })
        .collect();
    let same_radii = |a: &[f64], b: &[f64]| {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= rad_tol)
    };
    let same_gap = |a: f64, b: f64| (a - b).abs() <= ang_tol;

    let rotational = (1..m).any(|shift| {
        (0..m).all(|j| {
            let i = (j + shift) % m;
            same_radii(&rays[j].radii, &rays[i].radii) && same_gap(gaps[j], gaps[i])
        })
    });
    if rotational {
        return true;
    }
    // Clockwise traversal from ray t: element i is ray t-i together with the
    // gap to the ray after it in that direction.
    (0..m).any(|t| {
        (0..m).all(|i| {
            let r = (t + m - i % m) % m;
            let g = (t + 2 * m - i % m - 1) % m;
            same_radii(&rays[i].radii, &rays[r].radii) && same_gap(gaps[i], gaps[g])
        })
    })
}
