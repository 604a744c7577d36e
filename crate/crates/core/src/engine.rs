//! Ground-truth simulation: schedulers, crash injection and movement
//! truncation driven by pluggable adversaries.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::configuration::{coincidence_classes, Snapshot};
use crate::geometry::{eps_geo, smallest_enclosing_circle, Path, Point};
use crate::protocols::{Decision, Extent, MoveCommand, Protocol, Style};

/// Default fairness bound in rounds or time units.
pub const DEFAULT_FAIRNESS: f64 = 10.0;

/// Default minimum travel as a fraction of the initial enclosing radius.
pub const DEFAULT_S_FRACTION: f64 = 0.05;

/// Granularity of randomised activation delays, so distinct look instants
/// are never closer than this.
const DELAY_QUANTUM: f64 = 1.0 / 1024.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheduler {
    Ssync,
    AsyncIc,
    /// Fully asynchronous, driven step by step from a script. Looks and
    /// moves are separate steps, so a robot can act on a stale look.
    AsyncScripted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryKind {
    Benign,
    UniformRandom,
    GreedyMinimal,
    Mirror,
    Scripted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum ScriptStep {
    /// One synchronous round with the listed robots. `travel` caps the
    /// distance moved (never below the minimum travel).
    Activate {
        robots: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        travel: Option<f64>,
    },
    Look { robot: usize },
    Move {
        robot: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        travel: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarySpec {
    pub kind: AdversaryKind,
    #[serde(default = "default_fairness")]
    pub fairness: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<ScriptStep>,
}

fn default_fairness() -> f64 {
    DEFAULT_FAIRNESS
}

impl AdversarySpec {
    pub fn new(kind: AdversaryKind) -> Self {
        AdversarySpec { kind, fairness: DEFAULT_FAIRNESS, steps: Vec::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    RoundStart,
    Look,
    MoveStart,
    MoveEnd,
    Crash,
    RoundEnd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub t: f64,
    pub robot: Option<usize>,
    pub kind: EventKind,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub dest_x: Option<f64>,
    pub dest_y: Option<f64>,
    pub style: Option<Style>,
    pub extent: Option<Extent>,
    /// Full planned path, on `move_start`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<Path>,
    /// Distance covered, on `move_end` and mid-flight `crash`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traveled: Option<f64>,
    /// Ground-truth positions of all robots right after the event.
    pub positions: Vec<Point>,
}

impl TraceEvent {
    fn bare(t: f64, robot: Option<usize>, kind: EventKind, positions: Vec<Point>) -> Self {
        TraceEvent {
            t,
            robot,
            kind,
            x: None,
            y: None,
            dest_x: None,
            dest_y: None,
            style: None,
            extent: None,
            path: None,
            traveled: None,
            positions,
        }
    }

    fn at(mut self, p: Point) -> Self {
        self.x = Some(p.x);
        self.y = Some(p.y);
        self
    }

    fn with_command(mut self, c: &MoveCommand) -> Self {
        self.dest_x = Some(c.destination.x);
        self.dest_y = Some(c.destination.y);
        self.style = Some(c.style);
        self.extent = Some(c.extent);
        self
    }

    pub fn position(&self) -> Option<Point> {
        Some(Point::new(self.x?, self.y?))
    }

    pub fn destination(&self) -> Option<Point> {
        Some(Point::new(self.dest_x?, self.dest_y?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub scheduler: Scheduler,
    pub protocol: Protocol,
    pub adversary: AdversaryKind,
    pub n: usize,
    pub s_min: f64,
    pub fairness: f64,
    pub seed: u64,
    pub budget: f64,
    pub initial: Vec<Point>,
    pub crashes: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Gathered { time: f64, point: Point },
    BudgetExhausted,
    ProtocolError { time: f64, robot: usize, message: String },
    Rejected { message: String },
    /// An online observer asked to stop the run.
    Aborted { time: f64, reason: String },
}

impl Outcome {
    pub fn is_gathered(&self) -> bool {
        matches!(self, Outcome::Gathered { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Gathered { .. } => "gathered",
            Outcome::BudgetExhausted => "budget_exhausted",
            Outcome::ProtocolError { .. } => "protocol_error",
            Outcome::Rejected { .. } => "rejected",
            Outcome::Aborted { .. } => "aborted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub meta: TraceMeta,
    pub events: Vec<TraceEvent>,
}

impl Trace {
    /// One JSON document per event, newline terminated.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("trace events serialise"));
            out.push('\n');
        }
        out
    }

    pub fn events_from_jsonl(text: &str) -> Result<Vec<TraceEvent>, serde_json::Error> {
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub outcome: Outcome,
    pub trace: Trace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheduler: Scheduler,
    pub protocol: Protocol,
    pub adversary: AdversarySpec,
    /// Minimum travel per move; defaults to a fraction of the initial
    /// enclosing radius.
    pub s_min: Option<f64>,
    pub seed: u64,
    /// Rounds (synchronous) or time units (asynchronous).
    pub budget: f64,
    pub crashes: Vec<(usize, f64)>,
}

impl RunConfig {
    pub fn new(scheduler: Scheduler, protocol: Protocol, adversary: AdversaryKind) -> Self {
        RunConfig {
            scheduler,
            protocol,
            adversary: AdversarySpec::new(adversary),
            s_min: None,
            seed: 0,
            budget: 1e4,
            crashes: Vec::new(),
        }
    }
}

pub fn default_s_min(initial: &[Point]) -> f64 {
    let r = smallest_enclosing_circle(initial).map(|c| c.radius).unwrap_or(0.0);
    if r > 0.0 {
        DEFAULT_S_FRACTION * r
    } else {
        DEFAULT_S_FRACTION
    }
}

/// A move in progress. Travelled distance grows linearly from 0 at
/// `start_time` to `stop_at` after `duration`.
#[derive(Debug, Clone, PartialEq)]
pub struct Flight {
    pub command: MoveCommand,
    pub start_time: f64,
    pub duration: f64,
    pub stop_at: f64,
}

impl Flight {
    pub fn traveled_at(&self, t: f64) -> f64 {
        if self.duration <= 0.0 {
            return self.stop_at;
        }
        self.stop_at * ((t - self.start_time) / self.duration).clamp(0.0, 1.0)
    }

    pub fn position_at(&self, t: f64) -> Point {
        self.command.path.point_at_clamped(self.traveled_at(t))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotState {
    pub position: Point,
    pub crashed: bool,
    pub flight: Option<Flight>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    pub clock: f64,
    pub robots: Vec<RobotState>,
    pub s_min: f64,
    pub history: Vec<TraceEvent>,
}

impl WorldState {
    pub fn new(initial: &[Point], s_min: f64) -> Self {
        WorldState {
            clock: 0.0,
            robots: initial
                .iter()
                .map(|&position| RobotState { position, crashed: false, flight: None })
                .collect(),
            s_min,
            history: Vec::new(),
        }
    }

    pub fn position_at(&self, i: usize, t: f64) -> Point {
        let r = &self.robots[i];
        match &r.flight {
            Some(f) => f.position_at(t),
            None => r.position,
        }
    }

    pub fn positions_at(&self, t: f64) -> Vec<Point> {
        (0..self.robots.len()).map(|i| self.position_at(i, t)).collect()
    }

    pub fn alive(&self) -> Vec<usize> {
        (0..self.robots.len()).filter(|&i| !self.robots[i].crashed).collect()
    }

    /// Freezes robot `robot` at its position at `time`. `stamp` is the time
    /// written to the trace.
    fn crash(&mut self, robot: usize, time: f64, stamp: f64) {
        let Some(r) = self.robots.get(robot) else { return };
        if r.crashed {
            return;
        }
        let traveled = r.flight.as_ref().map(|f| f.traveled_at(time));
        let p = self.position_at(robot, time);
        let r = &mut self.robots[robot];
        r.position = p;
        r.flight = None;
        r.crashed = true;
        let positions = self.positions_at(time);
        let mut e = TraceEvent::bare(stamp, Some(robot), EventKind::Crash, positions).at(p);
        e.traveled = traveled;
        self.history.push(e);
    }

    /// Point at which all non-crashed robots coincide, if they do and none is
    /// moving.
    pub fn gathered_point(&self, t: f64) -> Option<Point> {
        let alive = self.alive();
        if alive.iter().any(|&i| self.robots[i].flight.is_some()) {
            return None;
        }
        let all = self.positions_at(t);
        let eps = scale_eps(&all);
        let pts: Vec<Point> = alive.iter().map(|&i| all[i]).collect();
        let first = *pts.first()?;
        (coincidence_classes(&pts, eps).len() == 1).then_some(first)
    }
}

/// Crash robot `robot` at `time`; a robot in flight is frozen at the point
/// it had reached.
pub fn inject_crash(mut world: WorldState, robot: usize, time: f64) -> WorldState {
    world.crash(robot, time, time);
    world.clock = world.clock.max(time);
    world
}

fn scale_eps(points: &[Point]) -> f64 {
    eps_geo(smallest_enclosing_circle(points).map(|c| c.radius).unwrap_or(0.0))
}

/// How far the adversary lets a robot travel along a path of length `len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopChoice {
    Full,
    Minimal,
    /// Fraction of the admissible range `[S, len]`.
    Fraction(f64),
    /// Absolute distance, clamped into the admissible range.
    Distance(f64),
}

/// Distance actually travelled: the whole path when it is no longer than
/// `s_min`, otherwise the adversary's choice within `[s_min, len]`.
pub fn truncate_move(len: f64, s_min: f64, choice: StopChoice) -> f64 {
    if len <= s_min {
        return len;
    }
    let d = match choice {
        StopChoice::Full => len,
        StopChoice::Minimal => s_min,
        StopChoice::Fraction(f) => s_min + f.clamp(0.0, 1.0) * (len - s_min),
        StopChoice::Distance(d) => d,
    };
    d.clamp(s_min, len)
}

struct Adversary {
    spec: AdversarySpec,
    rng: ChaCha8Rng,
    cursor: usize,
}

impl Adversary {
    fn new(spec: &AdversarySpec, seed: u64) -> Self {
        Adversary { spec: spec.clone(), rng: ChaCha8Rng::seed_from_u64(seed), cursor: 0 }
    }

    fn stop(&mut self) -> StopChoice {
        match self.spec.kind {
            AdversaryKind::Benign | AdversaryKind::Mirror | AdversaryKind::Scripted => {
                StopChoice::Full
            }
            AdversaryKind::GreedyMinimal => StopChoice::Minimal,
            AdversaryKind::UniformRandom => StopChoice::Fraction(self.rng.gen::<f64>()),
        }
    }

    fn delay(&mut self, n_alive: usize) -> f64 {
        let half = 0.5 * self.spec.fairness;
        match self.spec.kind {
            AdversaryKind::UniformRandom => {
                let q = (half / DELAY_QUANTUM).floor() as u64;
                self.rng.gen_range(0..=q) as f64 * DELAY_QUANTUM
            }
            AdversaryKind::GreedyMinimal => {
                (n_alive as f64 * 16.0 * DELAY_QUANTUM).min(half)
            }
            _ => (256.0 * DELAY_QUANTUM).min(half),
        }
    }

    fn first_activation(&mut self, robot: usize) -> f64 {
        match self.spec.kind {
            AdversaryKind::UniformRandom => self.delay(0),
            AdversaryKind::GreedyMinimal => {
                (robot as f64 * 16.0 * DELAY_QUANTUM).min(0.5 * self.spec.fairness)
            }
            _ => 0.0,
        }
    }
}

fn round_robin(alive: &[usize], cursor: &mut usize) -> Vec<usize> {
    let pick = alive.iter().copied().find(|&i| i >= *cursor).unwrap_or(alive[0]);
    *cursor = pick + 1;
    vec![pick]
}

fn occupied_after(positions: &[Point], moves: &[(usize, Point)]) -> usize {
    let mut pts = positions.to_vec();
    for &(i, p) in moves {
        pts[i] = p;
    }
    coincidence_classes(&pts, scale_eps(&pts)).len()
}

/// Receives trace events while a run is in progress.
pub trait EventSink {
    /// Returns a reason to stop the run, or `None` to continue.
    fn observe(&mut self, event: &TraceEvent) -> Option<String>;
}

struct Discard;

impl EventSink for Discard {
    fn observe(&mut self, _: &TraceEvent) -> Option<String> {
        None
    }
}

/// Feeds events not yet seen by the sink; returns a stop reason if any.
fn drain(world: &WorldState, seen: &mut usize, sink: &mut dyn EventSink) -> Option<String> {
    while *seen < world.history.len() {
        let e = &world.history[*seen];
        *seen += 1;
        if let Some(reason) = sink.observe(e) {
            return Some(reason);
        }
    }
    None
}

pub fn run(initial: &[Point], cfg: &RunConfig) -> RunResult {
    run_with(initial, cfg, &mut Discard)
}

/// Like [`run`], passing every event to `sink` as soon as it happens.
pub fn run_with(initial: &[Point], cfg: &RunConfig, sink: &mut dyn EventSink) -> RunResult {
    match cfg.scheduler {
        Scheduler::Ssync => ssync(initial, cfg, sink),
        Scheduler::AsyncIc => async_ic(initial, cfg, sink),
        Scheduler::AsyncScripted => async_scripted(initial, cfg, sink),
    }
}

/// Minimum travel actually used by a run of `cfg` from `initial`.
pub fn effective_s_min(initial: &[Point], cfg: &RunConfig) -> f64 {
    cfg.s_min.unwrap_or_else(|| default_s_min(initial))
}

/// Trace metadata for a run of `cfg` from `initial`.
pub fn meta(initial: &[Point], cfg: &RunConfig, s_min: f64) -> TraceMeta {
    TraceMeta {
        scheduler: cfg.scheduler,
        protocol: cfg.protocol,
        adversary: cfg.adversary.kind,
        n: initial.len(),
        s_min,
        fairness: cfg.adversary.fairness,
        seed: cfg.seed,
        budget: cfg.budget,
        initial: initial.to_vec(),
        crashes: cfg.crashes.clone(),
    }
}

fn finish(world: WorldState, meta: TraceMeta, outcome: Outcome) -> RunResult {
    RunResult { outcome, trace: Trace { meta, events: world.history } }
}

macro_rules! checkpoint {
    ($world:ident, $seen:ident, $sink:ident, $meta:ident, $t:expr) => {
        if let Some(reason) = drain(&$world, &mut $seen, $sink) {
            return finish($world, $meta, Outcome::Aborted { time: $t, reason });
        }
    };
}

/// After a move ends, put the robot exactly on its destination or on a
/// robot it reached within tolerance.
fn snap(world: &mut WorldState, robot: usize, dest: Point, t: f64) {
    let positions = world.positions_at(t);
    let eps = scale_eps(&positions);
    let p = positions[robot];
    let target = if p.approx_eq(dest, eps) {
        Some(dest)
    } else {
        positions
            .iter()
            .enumerate()
            .filter(|&(j, q)| j != robot && q.approx_eq(p, eps))
            .map(|(_, q)| *q)
            .next()
    };
    if let Some(q) = target {
        world.robots[robot].position = q;
    }
}

fn decide(
    protocol: Protocol,
    snap: &Snapshot,
    p: Point,
    n: usize,
    s_min: f64,
) -> Result<Option<MoveCommand>, String> {
    match protocol.decide(snap, p, n, s_min) {
        Ok(Decision::Stay) => Ok(None),
        Ok(Decision::Move(c)) => Ok(Some(c)),
        Err(e) => Err(e.to_string()),
    }
}

/// Semi-synchronous rounds. Round `r` occupies the interval `[r, r + 1)`;
/// every event of the round is stamped `r`.
pub fn run_ssync(initial: &[Point], cfg: &RunConfig) -> RunResult {
    ssync(initial, cfg, &mut Discard)
}

fn ssync(initial: &[Point], cfg: &RunConfig, sink: &mut dyn EventSink) -> RunResult {
    let mut seen = 0;
    let s_min = effective_s_min(initial, cfg);
    let meta = meta(initial, cfg, s_min);
    let n = initial.len();
    let mut world = WorldState::new(initial, s_min);
    let mut adv = Adversary::new(&cfg.adversary, cfg.seed);
    let mut crashes = cfg.crashes.clone();
    crashes.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut last_active = vec![-1i64; n];
    let budget = cfg.budget.max(0.0) as u64;
    let fairness = cfg.adversary.fairness.max(1.0) as i64;
    let mut round: u64 = 0;
    loop {
        let r = round as f64;
        world.clock = r;
        for &(i, _) in crashes.iter().filter(|c| c.1 <= r) {
            world.crash(i, r, r);
        }
        crashes.retain(|c| c.1 > r);
        checkpoint!(world, seen, sink, meta, r);
        if let Some(point) = world.gathered_point(r) {
            return finish(world, meta, Outcome::Gathered { time: r, point });
        }
        if round >= budget {
            return finish(world, meta, Outcome::BudgetExhausted);
        }
        let alive = world.alive();
        let positions = world.positions_at(r);
        world.history.push(TraceEvent::bare(r, None, EventKind::RoundStart, positions.clone()));
        let snapshot = Snapshot::new(positions.clone()).expect("finite positions");

        let mut commands: Vec<Option<Result<Option<MoveCommand>, String>>> = vec![None; n];
        let mut travel_cap: Option<f64> = None;
        let mut active: Vec<usize> = match adv.spec.kind {
            AdversaryKind::Benign => alive.clone(),
            AdversaryKind::UniformRandom => {
                let picked: Vec<usize> =
                    alive.iter().copied().filter(|_| adv.rng.gen_bool(0.5)).collect();
                if picked.is_empty() {
                    vec![alive[adv.rng.gen_range(0..alive.len())]]
                } else {
                    picked
                }
            }
            AdversaryKind::GreedyMinimal => round_robin(&alive, &mut adv.cursor),
            AdversaryKind::Scripted => match adv.spec.steps.get(round as usize) {
                Some(ScriptStep::Activate { robots, travel }) => {
                    travel_cap = *travel;
                    let picked: Vec<usize> =
                        robots.iter().copied().filter(|i| alive.contains(i)).collect();
                    if picked.is_empty() {
                        alive.clone()
                    } else {
                        picked
                    }
                }
                _ => alive.clone(),
            },
            AdversaryKind::Mirror => {
                // Preview every robot's move and activate a group that keeps
                // at least two occupied locations.
                for &i in &alive {
                    commands[i] = Some(decide(cfg.protocol, &snapshot, positions[i], n, s_min));
                }
                let ends = |set: &[usize]| -> Vec<(usize, Point)> {
                    set.iter()
                        .filter_map(|&i| match &commands[i] {
                            Some(Ok(Some(c))) => Some((i, c.path.end())),
                            _ => None,
                        })
                        .collect()
                };
                let eps = snapshot.eps();
                let groups: Vec<Vec<usize>> = coincidence_classes(&positions, eps)
                    .into_iter()
                    .map(|g| g.into_iter().filter(|i| alive.contains(i)).collect::<Vec<_>>())
                    .filter(|g| !g.is_empty())
                    .collect();
                let mut options = vec![alive.clone()];
                options.extend(groups);
                options
                    .iter()
                    .find(|set| occupied_after(&positions, &ends(set)) >= 2)
                    .cloned()
                    .unwrap_or_else(|| alive.clone())
            }
        };
        for &i in &alive {
            if round as i64 - last_active[i] >= fairness && !active.contains(&i) {
                active.push(i);
            }
        }
        active.sort_unstable();
        for &i in &active {
            last_active[i] = round as i64;
        }

        let mut moves: Vec<(usize, MoveCommand, f64)> = Vec::new();
        for &i in &active {
            let p = positions[i];
            world.history.push(TraceEvent::bare(r, Some(i), EventKind::Look, positions.clone()).at(p));
            let result = commands[i]
                .take()
                .unwrap_or_else(|| decide(cfg.protocol, &snapshot, p, n, s_min));
            match result {
                Ok(Some(c)) => {
                    let len = c.path.length();
                    let choice = match travel_cap {
                        Some(d) => StopChoice::Distance(d),
                        None => adv.stop(),
                    };
                    moves.push((i, c, truncate_move(len, s_min, choice)));
                }
                Ok(None) => {}
                Err(message) => {
                    return finish(world, meta, Outcome::ProtocolError { time: r, robot: i, message })
                }
            }
        }
        for (i, c, stop_at) in moves {
            let p = positions[i];
            let mut e = TraceEvent::bare(r, Some(i), EventKind::MoveStart, world.positions_at(r))
                .at(p)
                .with_command(&c);
            e.path = Some(c.path);
            world.history.push(e);
            world.robots[i].flight =
                Some(Flight { command: c, start_time: r, duration: 1.0, stop_at });
        }
        // Crashes strictly inside the round freeze robots part way.
        let inside: Vec<(usize, f64)> =
            crashes.iter().copied().filter(|c| c.1 < r + 1.0).collect();
        crashes.retain(|c| c.1 >= r + 1.0);
        for (i, t) in inside {
            world.crash(i, t, r);
        }
        for i in 0..n {
            let Some(f) = world.robots[i].flight.take() else { continue };
            let end = f.position_at(r + 1.0);
            world.robots[i].position = end;
            let dest = f.command.destination;
            snap(&mut world, i, dest, r + 1.0);
            let p = world.robots[i].position;
            let mut e = TraceEvent::bare(r, Some(i), EventKind::MoveEnd, world.positions_at(r))
                .at(p)
                .with_command(&f.command);
            e.traveled = Some(f.stop_at);
            world.history.push(e);
        }
        let positions = world.positions_at(r);
        world.history.push(TraceEvent::bare(r, None, EventKind::RoundEnd, positions));
        checkpoint!(world, seen, sink, meta, r);
        round += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Pending {
    Crash(usize),
    MoveEnd(usize, u64),
    Activate(usize, u64),
}

#[derive(Debug, Clone, Copy)]
struct Queued {
    time: f64,
    seq: u64,
    what: Pending,
}

impl PartialEq for Queued {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Queued {
    // Reversed so that the max-heap pops the earliest event first.
    fn cmp(&self, o: &Self) -> Ordering {
        o.time.total_cmp(&self.time).then(o.seq.cmp(&self.seq))
    }
}

/// Asynchronous scheduling with instantaneous computation: a robot starts
/// moving at the instant it looks. Robots move at unit speed.
pub fn run_async_ic(initial: &[Point], cfg: &RunConfig) -> RunResult {
    async_ic(initial, cfg, &mut Discard)
}

fn async_ic(initial: &[Point], cfg: &RunConfig, sink: &mut dyn EventSink) -> RunResult {
    let mut seen = 0;
    let s_min = effective_s_min(initial, cfg);
    let meta = meta(initial, cfg, s_min);
    let n = initial.len();
    let mut world = WorldState::new(initial, s_min);
    let mut adv = Adversary::new(&cfg.adversary, cfg.seed);
    let half = 0.5 * cfg.adversary.fairness;
    // A full cycle (flight plus idle delay) must fit in the fairness window.
    let max_flight = half.max(s_min);
    let mut queue = BinaryHeap::new();
    let mut seq = 0u64;
    let mut push = |queue: &mut BinaryHeap<Queued>, time: f64, what: Pending| {
        queue.push(Queued { time, seq, what });
        seq += 1;
    };
    let mut generation = vec![0u64; n];
    for &(i, t) in &cfg.crashes {
        push(&mut queue, t.max(0.0), Pending::Crash(i));
    }
    for i in 0..n {
        let t = adv.first_activation(i);
        push(&mut queue, t, Pending::Activate(i, 0));
    }
    let pre_crashed: Vec<usize> =
        cfg.crashes.iter().filter(|c| c.1 <= 0.0).map(|c| c.0).collect();
    for i in pre_crashed {
        world.crash(i, 0.0, 0.0);
    }
    checkpoint!(world, seen, sink, meta, 0.0);
    if let Some(point) = world.gathered_point(0.0) {
        return finish(world, meta, Outcome::Gathered { time: 0.0, point });
    }
    while let Some(q) = queue.pop() {
        if q.time > cfg.budget {
            break;
        }
        let t = q.time;
        world.clock = t;
        match q.what {
            Pending::Crash(i) => world.crash(i, t, t),
            Pending::MoveEnd(i, g) => {
                if world.robots[i].crashed || generation[i] != g {
                    continue;
                }
                let Some(f) = world.robots[i].flight.take() else { continue };
                world.robots[i].position = f.position_at(t);
                snap(&mut world, i, f.command.destination, t);
                let p = world.robots[i].position;
                let mut e = TraceEvent::bare(t, Some(i), EventKind::MoveEnd, world.positions_at(t))
                    .at(p)
                    .with_command(&f.command);
                e.traveled = Some(f.stop_at);
                world.history.push(e);
                generation[i] += 1;
                let d = adv.delay(world.alive().len());
                push(&mut queue, t + d, Pending::Activate(i, generation[i]));
            }
            Pending::Activate(i, g) => {
                if world.robots[i].crashed || generation[i] != g {
                    continue;
                }
                let positions = world.positions_at(t);
                let p = positions[i];
                world.history.push(TraceEvent::bare(t, Some(i), EventKind::Look, positions.clone()).at(p));
                let snapshot = Snapshot::new(positions).expect("finite positions");
                match decide(cfg.protocol, &snapshot, p, n, s_min) {
                    Ok(Some(c)) => {
                        let len = c.path.length();
                        let stop_at = truncate_move(len, s_min, adv.stop()).min(max_flight.max(s_min.min(len)));
                        let mut e = TraceEvent::bare(t, Some(i), EventKind::MoveStart, world.positions_at(t))
                            .at(p)
                            .with_command(&c);
                        e.path = Some(c.path);
                        world.history.push(e);
                        world.robots[i].flight =
                            Some(Flight { command: c, start_time: t, duration: stop_at, stop_at });
                        push(&mut queue, t + stop_at, Pending::MoveEnd(i, generation[i]));
                    }
                    Ok(None) => {
                        generation[i] += 1;
                        let d = adv.delay(world.alive().len()).max(DELAY_QUANTUM);
                        push(&mut queue, t + d, Pending::Activate(i, generation[i]));
                    }
                    Err(message) => {
                        return finish(world, meta, Outcome::ProtocolError { time: t, robot: i, message })
                    }
                }
            }
        }
        checkpoint!(world, seen, sink, meta, t);
        if let Some(point) = world.gathered_point(t) {
            return finish(world, meta, Outcome::Gathered { time: t, point });
        }
    }
    finish(world, meta, Outcome::BudgetExhausted)
}

/// Fully asynchronous demo scheduler: script steps run one per time unit.
/// A `look` stores the robot's decision; a later `move` carries it out from
/// wherever the robot is, however stale the look has become.
pub fn run_async_scripted(initial: &[Point], cfg: &RunConfig) -> RunResult {
    async_scripted(initial, cfg, &mut Discard)
}

fn async_scripted(initial: &[Point], cfg: &RunConfig, sink: &mut dyn EventSink) -> RunResult {
    let mut seen = 0;
    let s_min = effective_s_min(initial, cfg);
    let meta = meta(initial, cfg, s_min);
    let n = initial.len();
    let mut world = WorldState::new(initial, s_min);
    let mut pending: Vec<Option<MoveCommand>> = vec![None; n];
    let steps = cfg.adversary.steps.clone();
    for (k, step) in steps.iter().enumerate() {
        let t = k as f64;
        if t > cfg.budget {
            break;
        }
        world.clock = t;
        for &(i, ct) in &cfg.crashes {
            if ct <= t {
                world.crash(i, t, t);
            }
        }
        match *step {
            ScriptStep::Look { robot } if robot < n && !world.robots[robot].crashed => {
                let positions = world.positions_at(t);
                let p = positions[robot];
                world.history.push(TraceEvent::bare(t, Some(robot), EventKind::Look, positions.clone()).at(p));
                let snapshot = Snapshot::new(positions).expect("finite positions");
                match decide(cfg.protocol, &snapshot, p, n, s_min) {
                    Ok(c) => pending[robot] = c,
                    Err(message) => {
                        return finish(world, meta, Outcome::ProtocolError { time: t, robot, message })
                    }
                }
            }
            ScriptStep::Move { robot, travel } if robot < n && !world.robots[robot].crashed => {
                let Some(c) = pending[robot].take() else { continue };
                let len = c.path.length();
                let choice = travel.map_or(StopChoice::Full, StopChoice::Distance);
                let stop_at = truncate_move(len, s_min, choice);
                let start = world.robots[robot].position;
                let mut e = TraceEvent::bare(t, Some(robot), EventKind::MoveStart, world.positions_at(t))
                    .at(start)
                    .with_command(&c);
                e.path = Some(c.path);
                world.history.push(e);
                world.robots[robot].position = c.path.point_at_clamped(stop_at);
                snap(&mut world, robot, c.destination, t);
                let p = world.robots[robot].position;
                let mut e = TraceEvent::bare(t, Some(robot), EventKind::MoveEnd, world.positions_at(t))
                    .at(p)
                    .with_command(&c);
                e.traveled = Some(stop_at);
                world.history.push(e);
            }
            _ => continue,
        }
        checkpoint!(world, seen, sink, meta, t);
        if let Some(point) = world.gathered_point(t) {
            return finish(world, meta, Outcome::Gathered { time: t, point });
        }
    }
    finish(world, meta, Outcome::BudgetExhausted)
}
