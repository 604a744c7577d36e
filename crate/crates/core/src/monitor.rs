//! Invariant checks over run traces. Every check is an incremental state
//! machine, so the same code serves post-hoc checking of a finished trace
//! and online checking while a run is in progress.

use serde::{Deserialize, Serialize};

use crate::configuration::{classify_tag, coincidence_classes, multiplicity_view, ConfigTag, Snapshot};
use crate::engine::{EventKind, EventSink, Scheduler, TraceEvent, TraceMeta};
use crate::geometry::{eps_geo, smallest_enclosing_circle, Circle, Point};
use crate::protocols::{async_plan, Protocol, Style};

/// Upper bound on a radial mover's distance to the new center after it
/// moved `delta` toward the center of an enclosing circle of radius `r`.
pub fn radial_bound(r: f64, delta: f64) -> f64 {
    0.5 * (r - delta) + 0.5 * ((r + delta).powi(2) - 2.0 * delta * delta).max(0.0).sqrt()
}

/// Minimum progress toward the destination of a robot that covers
/// arc length `s` on a circular path starting at distance `d`.
pub fn arc_progress_bound(d: f64, s: f64) -> f64 {
    d * (1.0 - (s / d).cos())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub from_event: usize,
    pub to_event: usize,
    pub t_from: f64,
    pub t_to: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// False when the trace does not meet the check's precondition; the
    /// check then passes vacuously.
    pub applicable: bool,
    pub pass: bool,
    pub witness: Option<Witness>,
    pub measured: Option<f64>,
    /// Number of individual cases examined.
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub checks: Vec<CheckResult>,
    pub findings: Vec<String>,
}

impl InvariantReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }
}

/// Context shared by all checkers.
#[derive(Debug, Clone)]
pub struct Context {
    pub meta: TraceMeta,
}

impl Context {
    fn ssync(&self) -> bool {
        self.meta.scheduler == Scheduler::Ssync
    }
}

fn sec_of(points: &[Point]) -> Circle {
    smallest_enclosing_circle(points).unwrap_or(Circle::new(Point::new(0.0, 0.0), 0.0))
}

fn eps_of(points: &[Point]) -> f64 {
    eps_geo(sec_of(points).radius)
}

/// Multiplicity point if any, otherwise the enclosing circle's center.
fn destination_of(points: &[Point]) -> Option<Point> {
    let s = Snapshot::new(points.to_vec()).ok()?;
    let m: Vec<Point> = multiplicity_view(&s).multiplicities().collect();
    match m.len() {
        0 => Some(s.sec().center),
        1 => Some(m[0]),
        _ => None,
    }
}

fn has_multiplicity(points: &[Point]) -> bool {
    coincidence_classes(points, eps_of(points)).iter().any(|g| g.len() > 1)
}

pub trait Checker: Send {
    fn name(&self) -> &'static str;
    fn observe(&mut self, index: usize, e: &TraceEvent, cx: &Context);
    fn result(&self) -> CheckResult;
}

/// Shared bookkeeping for pass/fail with the first witness.
#[derive(Debug, Clone, Default)]
struct Verdict {
    witness: Option<Witness>,
    samples: u64,
}

impl Verdict {
    fn fail(&mut self, from: (usize, f64), to: (usize, f64), detail: String) {
        if self.witness.is_none() {
            self.witness = Some(Witness {
                from_event: from.0,
                to_event: to.0,
                t_from: from.1,
                t_to: to.1,
                detail,
            });
        }
    }

    fn result(&self, name: &str, applicable: bool, measured: Option<f64>) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            applicable,
            pass: self.witness.is_none(),
            witness: self.witness.clone(),
            measured,
            samples: self.samples,
        }
    }
}

/// The enclosing radius strictly shrinks whenever its center moves.
#[derive(Default)]
pub struct RadiusMonotone {
    v: Verdict,
    applicable: Option<bool>,
    done: bool,
    prev: Option<(usize, f64, Circle)>,
    min_decrease: Option<f64>,
}

impl Checker for RadiusMonotone {
    fn name(&self) -> &'static str {
        "radius_monotone"
    }
    fn observe(&mut self, i: usize, e: &TraceEvent, cx: &Context) {
        let app = *self
            .applicable
            .get_or_insert(cx.ssync() && cx.meta.protocol == Protocol::GatherK);
        if !app || self.done || e.kind != EventKind::RoundStart {
            return;
        }
        if has_multiplicity(&e.positions) {
            self.done = true;
            return;
        }
        let c = sec_of(&e.positions);
        if let Some((j, t, prev)) = self.prev {
            let eps = eps_geo(prev.radius);
            if prev.center.dist(c.center) > eps {
                self.v.samples += 1;
                let dec = prev.radius - c.radius;
                self.min_decrease = Some(self.min_decrease.map_or(dec, |m: f64| m.min(dec)));
                if dec <= 0.0 {
                    self.v.fail(
                        (j, t),
                        (i, e.t),
                        format!("center moved but radius went {} -> {}", prev.radius, c.radius),
                    );
                }
            }
        }
        self.prev = Some((i, e.t, c));
    }
    fn result(&self) -> CheckResult {
        self.v.result(self.name(), self.applicable.unwrap_or(false), self.min_decrease)
    }
}

#[derive(Clone, Copy)]
struct RoundMover {
    robot: usize,
    delta: f64,
}

/// Straight movers toward the center end up within the closed-form bound of
/// the new center.
#[derive(Default)]
pub struct RadialBound {
    v: Verdict,
    applicable: Option<bool>,
    start: Option<(usize, f64, Circle, bool)>,
    movers: Vec<RoundMover>,
    worst: Option<f64>,
}

impl Checker for RadialBound {
    fn name(&self) -> &'static str {
        "radial_bound"
    }
    fn observe(&mut self, i: usize, e: &TraceEvent, cx: &Context) {
        let app = *self.applicable.get_or_insert(cx.ssync());
        if !app {
            return;
        }
        match e.kind {
            EventKind::RoundStart => {
                let mult = has_multiplicity(&e.positions);
                self.start = Some((i, e.t, sec_of(&e.positions), mult));
                self.movers.clear();
            }
            EventKind::MoveEnd => {
                let Some((_, _, c, false)) = self.start else { return };
                let (Some(dest), Some(delta)) = (e.destination(), e.traveled) else { return };
                if e.style == Some(Style::Straight) && dest.approx_eq(c.center, eps_geo(c.radius)) {
                    self.movers.push(RoundMover { robot: e.robot.unwrap_or(0), delta });
                }
            }
            EventKind::RoundEnd => {
                let Some((j, t, c, _)) = self.start.take() else { return };
                if self.movers.is_empty() {
                    return;
                }
                let next = sec_of(&e.positions).center;
                let tol = eps_geo(c.radius);
                for m in self.movers.drain(..) {
                    let d = e.positions[m.robot].dist(next);
                    let bound = radial_bound(c.radius, m.delta);
                    self.v.samples += 1;
                    let excess = d - bound;
                    self.worst = Some(self.worst.map_or(excess, |w: f64| w.max(excess)));
                    if excess > tol {
                        self.v.fail(
                            (j, t),
                            (i, e.t),
                            format!(
                                "robot {} at distance {d} exceeds bound {bound} (r = {}, delta = {})",
                                m.robot, c.radius, m.delta
                            ),
                        );
                    }
                }
            }
            _ => {}
        }
    }
    fn result(&self) -> CheckResult {
        self.v.result(self.name(), self.applicable.unwrap_or(false), self.worst)
    }
}

/// Circular movers covering at least the minimum travel make at least the
/// closed-form progress toward their destination.
#[derive(Default)]
pub struct ArcProgress {
    v: Verdict,
    starts: Vec<Option<(usize, f64, Point)>>,
    margin: Option<f64>,
}

impl Checker for ArcProgress {
    fn name(&self) -> &'static str {
        "arc_progress"
    }
    fn observe(&mut self, i: usize, e: &TraceEvent, cx: &Context) {
        if self.starts.is_empty() {
            self.starts = vec![None; cx.meta.n];
        }
        let Some(r) = e.robot else { return };
        match e.kind {
            EventKind::MoveStart => {
                if let Some(p) = e.position() {
                    self.starts[r] = Some((i, e.t, p));
                }
            }
            EventKind::MoveEnd => {
                let Some((j, t, p)) = self.starts[r].take() else { return };
                let s = cx.meta.s_min;
                let (Some(dest), Some(traveled)) = (e.destination(), e.traveled) else { return };
                if e.style != Some(Style::Circular) || traveled + 1e-12 < s {
                    return;
                }
                let end = e.positions[r];
                let d0 = p.dist(dest);
                let progress = d0 - end.dist(dest);
                // Minor arcs toward the destination are at most a quarter turn of the
                // circle with diameter d0, so beyond that the robot has arrived.
                let need = if s / d0 < std::f64::consts::FRAC_PI_2 {
                    arc_progress_bound(d0, s)
                } else {
                    d0
                };
                let m = progress - need;
                self.v.samples += 1;
                self.margin = Some(self.margin.map_or(m, |x: f64| x.min(m)));
                if m < -eps_geo(d0) {
                    self.v.fail(
                        (j, t),
                        (i, e.t),
                        format!("robot {r} progressed {progress}, needed {need}"),
                    );
                }
            }
            EventKind::Crash => self.starts[r] = None,
            _ => {}
        }
    }
    fn result(&self) -> CheckResult {
        self.v.result(self.name(), true, self.margin)
    }
}

/// At most one multiplicity point at any time, and it never moves.
#[derive(Default)]
pub struct SingleMultiplicity {
    v: Verdict,
    applicable: Option<bool>,
    location: Option<(usize, f64, Point)>,
    most: usize,
}

impl Checker for SingleMultiplicity {
    fn name(&self) -> &'static str {
        "single_multiplicity"
    }
    fn observe(&mut self, i: usize, e: &TraceEvent, cx: &Context) {
        let app = *self.applicable.get_or_insert_with(|| {
            Snapshot::new(cx.meta.initial.clone())
                .map(|s| crate::configuration::is_legal(&s))
                .unwrap_or(false)
        });
        if !app {
            return;
        }
        self.v.samples += 1;
        let eps = eps_of(&e.positions);
        let classes: Vec<Vec<usize>> = coincidence_classes(&e.positions, eps)
            .into_iter()
            .filter(|g| g.len() > 1)
            .collect();
        self.most = self.most.max(classes.len());
        if classes.len() > 1 {
            let from = self.location.map_or((i, e.t), |(j, t, _)| (j, t));
            self.v.fail(from, (i, e.t), format!("{} multiplicity points", classes.len()));
            return;
        }
        if let Some(g) = classes.first() {
            match self.location {
                None => self.location = Some((i, e.t, e.positions[g[0]])),
                Some((j, t, at)) => {
                    if !g.iter().any(|&k| e.positions[k].approx_eq(at, eps)) {
                        self.v.fail(
                            (j, t),
                            (i, e.t),
                            format!("multiplicity moved from {at} to {}", e.positions[g[0]]),
                        );
                    }
                }
            }
        }
    }
    fn result(&self) -> CheckResult {
        self.v.result(self.name(), self.applicable.unwrap_or(false), Some(self.most as f64))
    }
}

/// The enclosing circle stays put until a multiplicity forms.
#[derive(Default)]
pub struct SecInvariant {
    v: Verdict,
    applicable: Option<bool>,
    first: Option<(usize, f64, Circle)>,
    done: bool,
    drift: f64,
}

impl Checker for SecInvariant {
    fn name(&self) -> &'static str {
        "sec_invariant"
    }
    fn observe(&mut self, i: usize, e: &TraceEvent, cx: &Context) {
        let app = *self.applicable.get_or_insert_with(|| {
            cx.meta.protocol == Protocol::AsyncGather && !has_multiplicity(&cx.meta.initial)
        });
        if !app || self.done {
            return;
        }
        if has_multiplicity(&e.positions) {
            self.done = true;
            return;
        }
        let c = sec_of(&e.positions);
        let (j, t, c0) = *self.first.get_or_insert((i, e.t, c));
        let drift = c.center.dist(c0.center).max((c.radius - c0.radius).abs());
        self.drift = self.drift.max(drift);
        self.v.samples += 1;
        if drift > eps_geo(c0.radius) {
            self.v.fail(
                (j, t),
                (i, e.t),
                format!("enclosing circle moved by {drift}"),
            );
        }
    }
    fn result(&self) -> CheckResult {
        let app = self.applicable.unwrap_or(false) && self.first.is_some();
        self.v.result(self.name(), app, Some(self.drift))
    }
}

/// Degenerate equal-occupancy classes only in the untouched initial
/// configuration; a multiplicity is permanent; the run ends gathered.
#[derive(Default)]
pub struct TransitionGraph {
    v: Verdict,
    applicable: Option<bool>,
    moved: bool,
    last: Option<(usize, f64, ConfigTag)>,
    crashed: Vec<bool>,
    end: Option<(usize, f64, Vec<Point>)>,
    seen_mult: bool,
    changes: u64,
}


fn allowed(from: ConfigTag, to: ConfigTag) -> bool {
    from == to || to == ConfigTag::Mult || (from != ConfigTag::Mult && to == ConfigTag::Cell)
}

impl Checker for TransitionGraph {
    fn name(&self) -> &'static str {
        "transition_graph"
    }
    fn observe(&mut self, i: usize, e: &TraceEvent, cx: &Context) {
        let app = *self.applicable.get_or_insert(cx.meta.protocol == Protocol::AsyncGather);
        if !app {
            return;
        }
        if self.crashed.is_empty() {
            self.crashed = vec![false; cx.meta.n];
        }
        if e.kind == EventKind::Crash {
            if let Some(r) = e.robot {
                self.crashed[r] = true;
            }
        }
        if !self.moved && e.positions != cx.meta.initial {
            self.moved = true;
        }
        let Ok(s) = Snapshot::new(e.positions.clone()) else { return };
        let tag = classify_tag(&s, cx.meta.n);
        self.v.samples += 1;
        self.seen_mult |= tag == ConfigTag::Mult;
        if tag.is_degenerate() && self.moved {
            let (j, t) = self.last.map_or((i, e.t), |(j, t, _)| (j, t));
            self.v.fail((j, t), (i, e.t), format!("entered {tag:?} after the start"));
        }
        if let Some((j, t, prev)) = self.last {
            if prev != tag {
                self.changes += 1;
                if !allowed(prev, tag) {
                    self.v.fail((j, t), (i, e.t), format!("transition {prev:?} -> {tag:?}"));
                }
            }
        }
        self.last = Some((i, e.t, tag));
        self.end = Some((i, e.t, e.positions.clone()));
    }
    fn result(&self) -> CheckResult {
        let mut v = self.v.clone();
        if let Some((i, t, pos)) = &self.end {
            let alive: Vec<Point> = pos
                .iter()
                .enumerate()
                .filter(|(k, _)| !self.crashed.get(*k).copied().unwrap_or(false))
                .map(|(_, p)| *p)
                .collect();
            let gathered = coincidence_classes(&alive, eps_of(pos)).len() <= 1;
            if !gathered {
                v.fail((*i, *t), (*i, *t), "run did not end gathered".into());
            } else if !self.seen_mult && alive.len() > 1 {
                v.fail((*i, *t), (*i, *t), "gathered without passing through Mult".into());
            }
        }
        v.result(self.name(), self.applicable.unwrap_or(false), Some(self.changes as f64))
    }
}

/// Every activated robot away from the destination moves.
#[derive(Default)]
pub struct WaitFreedom {
    v: Verdict,
    applicable: Option<bool>,
    pending: Vec<Option<(usize, f64)>>,
}

impl WaitFreedom {
    fn settle(&mut self, r: usize, i: usize, t: f64) {
        if let Some((j, tj)) = self.pending[r].take() {
            self.v.fail((j, tj), (i, t), format!("robot {r} looked but did not move"));
        }
    }
}

impl Checker for WaitFreedom {
    fn name(&self) -> &'static str {
        "wait_freedom"
    }
    fn observe(&mut self, i: usize, e: &TraceEvent, cx: &Context) {
        let app = *self.applicable.get_or_insert(cx.meta.protocol == Protocol::GatherK);
        if !app {
            return;
        }
        if self.pending.is_empty() {
            self.pending = vec![None; cx.meta.n];
        }
        match (e.kind, e.robot) {
            (EventKind::Look, Some(r)) => {
                self.settle(r, i, e.t);
                let Some(dest) = destination_of(&e.positions) else { return };
                if e.positions[r].dist(dest) > eps_of(&e.positions) {
                    self.v.samples += 1;
                    self.pending[r] = Some((i, e.t));
                }
            }
            (EventKind::MoveStart, Some(r)) => {
                if e.path.as_ref().map_or(0.0, |p| p.length()) > 0.0 {
                    self.pending[r] = None;
                }
            }
            (EventKind::RoundEnd, _) => {
                for r in 0..self.pending.len() {
                    self.settle(r, i, e.t);
                }
            }
            _ => {}
        }
    }
    fn result(&self) -> CheckResult {
        let mut v = self.v.clone();
        for (r, p) in self.pending.iter().enumerate() {
            if let Some((j, t)) = p {
                v.fail((*j, *t), (*j, *t), format!("robot {r} looked but did not move"));
            }
        }
        v.result(self.name(), self.applicable.unwrap_or(false), None)
    }
}

/// A crashed robot never changes position again.
#[derive(Default)]
pub struct CrashFreeze {
    v: Verdict,
    frozen: Vec<Option<(usize, f64, Point)>>,
}

impl Checker for CrashFreeze {
    fn name(&self) -> &'static str {
        "crash_freeze"
    }
    fn observe(&mut self, i: usize, e: &TraceEvent, cx: &Context) {
        if self.frozen.is_empty() {
            self.frozen = vec![None; cx.meta.n];
        }
        for (r, f) in self.frozen.iter().enumerate() {
            if let Some((j, t, p)) = *f {
                self.v.samples += 1;
                if e.positions[r] != p {
                    self.v.fail((j, t), (i, e.t), format!("crashed robot {r} moved"));
                }
            }
        }
        if let (EventKind::Crash, Some(r)) = (e.kind, e.robot) {
            if self.frozen[r].is_none() {
                self.frozen[r] = Some((i, e.t, e.positions[r]));
            }
        }
    }
    fn result(&self) -> CheckResult {
        self.v.result(self.name(), true, None)
    }
}

/// No live robot goes longer than the fairness bound between activations.
#[derive(Default)]
pub struct Fairness {
    v: Verdict,
    applicable: Option<bool>,
    last: Vec<(usize, f64)>,
    crashed: Vec<bool>,
    widest: f64,
}

impl Checker for Fairness {
    fn name(&self) -> &'static str {
        "fairness"
    }
    fn observe(&mut self, i: usize, e: &TraceEvent, cx: &Context) {
        let app = *self.applicable.get_or_insert(cx.meta.scheduler != Scheduler::AsyncScripted);
        if !app {
            return;
        }
        if self.last.is_empty() {
            let origin = if cx.ssync() { -1.0 } else { 0.0 };
            self.last = vec![(0, origin); cx.meta.n];
            self.crashed = vec![false; cx.meta.n];
        }
        let Some(r) = e.robot else { return };
        match e.kind {
            EventKind::Crash => self.crashed[r] = true,
            EventKind::Look if !self.crashed[r] => {
                let (j, t) = self.last[r];
                let gap = e.t - t;
                self.widest = self.widest.max(gap);
                self.v.samples += 1;
                if gap > cx.meta.fairness + 1e-9 {
                    self.v.fail((j, t), (i, e.t), format!("robot {r} idle for {gap}"));
                }
                self.last[r] = (i, e.t);
            }
            _ => {}
        }
    }
    fn result(&self) -> CheckResult {
        self.v.result(self.name(), self.applicable.unwrap_or(false), Some(self.widest))
    }
}

/// All robots activated in one synchronous round see the same snapshot.
#[derive(Default)]
pub struct SsyncAtomicity {
    v: Verdict,
    applicable: Option<bool>,
    first: Option<(usize, f64, Vec<Point>)>,
}

impl Checker for SsyncAtomicity {
    fn name(&self) -> &'static str {
        "ssync_atomicity"
    }
    fn observe(&mut self, i: usize, e: &TraceEvent, cx: &Context) {
        let app = *self.applicable.get_or_insert(cx.ssync());
        if !app {
            return;
        }
        match e.kind {
            EventKind::RoundStart => self.first = None,
            EventKind::Look => match &self.first {
                None => self.first = Some((i, e.t, e.positions.clone())),
                Some((j, t, p)) => {
                    self.v.samples += 1;
                    if *p != e.positions {
                        let (j, t) = (*j, *t);
                        self.v.fail((j, t), (i, e.t), "looks within a round differ".into());
                    }
                }
            },
            _ => {}
        }
    }
    fn result(&self) -> CheckResult {
        self.v.result(self.name(), self.applicable.unwrap_or(false), None)
    }
}

/// With instantaneous computation a move starts right at its look.
#[derive(Default)]
pub struct LookMoveGap {
    v: Verdict,
    applicable: Option<bool>,
    prev: Option<(usize, TraceEvent)>,
}

impl Checker for LookMoveGap {
    fn name(&self) -> &'static str {
        "look_move_gap"
    }
    fn observe(&mut self, i: usize, e: &TraceEvent, cx: &Context) {
        let app = *self.applicable.get_or_insert(cx.meta.scheduler == Scheduler::AsyncIc);
        if !app {
            return;
        }
        if e.kind == EventKind::MoveStart {
            self.v.samples += 1;
            let ok = matches!(&self.prev, Some((_, p))
                if p.kind == EventKind::Look && p.robot == e.robot && p.t == e.t);
            if !ok {
                let from = self.prev.as_ref().map_or((i, e.t), |(j, p)| (*j, p.t));
                self.v.fail(from, (i, e.t), format!("move of robot {:?} not preceded by its look", e.robot));
            }
        }
        self.prev = Some((i, e.clone()));
    }
    fn result(&self) -> CheckResult {
        self.v.result(self.name(), self.applicable.unwrap_or(false), Some(0.0))
    }
}

/// Protocol observations worth reporting that are not check failures.
#[derive(Default)]
struct Findings {
    seen: Vec<String>,
}

impl Findings {
    fn observe(&mut self, e: &TraceEvent, cx: &Context) {
        if cx.meta.protocol != Protocol::AsyncGather || e.kind != EventKind::Look {
            return;
        }
        let Ok(s) = Snapshot::new(e.positions.clone()) else { return };
        if let Ok(plan) = async_plan(&s, cx.meta.n) {
            for f in plan.findings {
                let line = format!("t={}: {f}", e.t);
                if !self.seen.iter().any(|x| x.ends_with(&f)) {
                    self.seen.push(line);
                }
            }
        }
    }
}

pub const CHECK_NAMES: [&str; 11] = [
    "radius_monotone",
    "radial_bound",
    "arc_progress",
    "single_multiplicity",
    "sec_invariant",
    "transition_graph",
    "wait_freedom",
    "crash_freeze",
    "fairness",
    "ssync_atomicity",
    "look_move_gap",
];

/// Runs every check over a stream of events.
pub struct Monitor {
    cx: Context,
    checks: Vec<Box<dyn Checker>>,
    findings: Findings,
    index: usize,
    fail_fast: bool,
}

impl Monitor {
    pub fn new(meta: TraceMeta) -> Self {
        Monitor {
            cx: Context { meta },
            checks: vec![
                Box::new(RadiusMonotone::default()),
                Box::new(RadialBound::default()),
                Box::new(ArcProgress::default()),
                Box::new(SingleMultiplicity::default()),
                Box::new(SecInvariant::default()),
                Box::new(TransitionGraph::default()),
                Box::new(WaitFreedom::default()),
                Box::new(CrashFreeze::default()),
                Box::new(Fairness::default()),
                Box::new(SsyncAtomicity::default()),
                Box::new(LookMoveGap::default()),
            ],
            findings: Findings::default(),
            index: 0,
            fail_fast: false,
        }
    }

    /// Online use: stop the run at the first failed check.
    pub fn fail_fast(mut self) -> Self {
        self.fail_fast = true;
        self
    }

    pub fn push(&mut self, e: &TraceEvent) {
        for c in &mut self.checks {
            c.observe(self.index, e, &self.cx);
        }
        self.findings.observe(e, &self.cx);
        self.index += 1;
    }

    pub fn report(&self) -> InvariantReport {
        InvariantReport {
            checks: self.checks.iter().map(|c| c.result()).collect(),
            findings: self.findings.seen.clone(),
        }
    }
}

impl EventSink for Monitor {
    fn observe(&mut self, e: &TraceEvent) -> Option<String> {
        self.push(e);
        if !self.fail_fast {
            return None;
        }
        // Only failures that are final mid-trace; end-of-trace conditions
        // are settled by the report.
        self.checks
            .iter()
            .map(|c| c.result())
            .find(|r| !r.pass && r.name != "transition_graph" && r.name != "wait_freedom")
            .map(|r| format!("check {} failed", r.name))
    }
}

/// Post-hoc check of a complete trace.
pub fn check_trace(meta: &TraceMeta, events: &[TraceEvent]) -> InvariantReport {
    let mut m = Monitor::new(meta.clone());
    for e in events {
        m.push(e);
    }
    m.report()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_closed_form() {
        let b = radial_bound(1.0, 0.5);
        assert!((b - (0.25 + 0.5 * 1.75f64.sqrt())).abs() < 1e-15);
        assert!((b - 0.911437827766148).abs() < 1e-12);
    }

    #[test]
    fn arc_closed_form() {
        let l = arc_progress_bound(1.0, 0.1);
        assert!((l - 4.995834721974e-3).abs() < 1e-12);
        // the quadratic comparison is an upper bound, not a lower one
        assert!(l < 0.1 * 0.1 / 2.0);
    }

    #[test]
    fn names_match_checkers() {
        let meta = TraceMeta {
            scheduler: Scheduler::Ssync,
            protocol: Protocol::GatherK,
            adversary: crate::engine::AdversaryKind::Benign,
            n: 1,
            s_min: 0.1,
            fairness: 10.0,
            seed: 0,
            budget: 1.0,
            initial: vec![Point::new(0.0, 0.0)],
            crashes: vec![],
        };
        let r = check_trace(&meta, &[]);
        let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, CHECK_NAMES);
        assert!(r.all_pass());
    }
}
