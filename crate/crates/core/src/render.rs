//! SVG frames of a trace, one per sampled event.

use std::fmt::Write as _;

use crate::configuration::{coincidence_classes, make_cells, Snapshot};
use crate::engine::{EventKind, TraceEvent};
use crate::geometry::{Path, Point};

/// Fixed-precision number with negative zero folded into zero.
fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy)]
struct Bounds {
    min: Point,
    max: Point,
}

impl Bounds {
    fn of(events: &[TraceEvent]) -> Bounds {
        let mut b = Bounds { min: Point::new(f64::MAX, f64::MAX), max: Point::new(f64::MIN, f64::MIN) };
        let mut grow = |p: Point, r: f64| {
            b.min = Point::new(b.min.x.min(p.x - r), b.min.y.min(p.y - r));
            b.max = Point::new(b.max.x.max(p.x + r), b.max.y.max(p.y + r));
        };
        for e in events {
            for &p in &e.positions {
                grow(p, 0.0);
            }
            if let Ok(s) = Snapshot::new(e.positions.clone()) {
                let c = s.sec();
                grow(c.center, c.radius);
            }
        }
        let side = (b.max.x - b.min.x).max(b.max.y - b.min.y).max(1e-6);
        let pad = 0.08 * side;
        let mid = (b.min + b.max) * 0.5;
        let half = side / 2.0 + pad;
        Bounds { min: mid - Point::new(half, half), max: mid + Point::new(half, half) }
    }

    fn side(&self) -> f64 {
        self.max.x - self.min.x
    }
}

fn path_data(path: &Path) -> String {
    match path {
        Path::Segment(s) => {
            format!("M {} {} L {} {}", num(s.from.x), num(s.from.y), num(s.to.x), num(s.to.y))
        }
        Path::Arc(a) => {
            let large = u8::from(a.sweep.abs() > std::f64::consts::PI);
            let ccw = u8::from(a.sweep > 0.0);
            let r = num(a.circle.radius);
            format!(
                "M {} {} A {r} {r} 0 {large} {ccw} {} {}",
                num(a.start.x),
                num(a.start.y),
                num(a.end.x),
                num(a.end.y)
            )
        }
    }
}

/// Number of frames produced for `events` sampled every `every` events.
pub fn frame_count(events: usize, every: usize) -> usize {
    events.div_ceil(every.max(1))
}

/// Renders frames at events `0, every, 2*every, ...`. The view box is shared
/// by all frames so they can be played back as an animation. Traces without
/// round markers are treated as asynchronous and show the cell borders.
pub fn render_frames(events: &[TraceEvent], every: usize) -> Vec<String> {
    let every = every.max(1);
    if events.is_empty() {
        return Vec::new();
    }
    let bounds = Bounds::of(events);
    let asynchronous = !events.iter().any(|e| e.kind == EventKind::RoundStart);
    let n = events[0].positions.len();
    let mut flights: Vec<Option<Path>> = vec![None; n];
    let mut crashed = vec![false; n];
    let mut frames = Vec::with_capacity(frame_count(events.len(), every));
    for (i, e) in events.iter().enumerate() {
        if let Some(r) = e.robot.filter(|&r| r < n) {
            match e.kind {
                EventKind::MoveStart => flights[r] = e.path,
                EventKind::MoveEnd => flights[r] = None,
                EventKind::Crash => {
                    flights[r] = None;
                    crashed[r] = true;
                }
                _ => {}
            }
        }
        if i % every == 0 {
            frames.push(frame(e, i, &bounds, asynchronous, &flights, &crashed));
        }
    }
    frames
}

fn frame(
    e: &TraceEvent,
    index: usize,
    b: &Bounds,
    asynchronous: bool,
    flights: &[Option<Path>],
    crashed: &[bool],
) -> String {
    let side = b.side();
    let unit = side / 200.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"600\" height=\"600\">",
        num(b.min.x),
        num(-b.max.y),
        num(side),
        num(side)
    );
    let _ = writeln!(
        out,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"white\"/>",
        num(b.min.x),
        num(-b.max.y),
        num(side),
        num(side)
    );
    let _ = writeln!(
        out,
        "<g transform=\"scale(1,-1)\" fill=\"none\" stroke-width=\"{}\">",
        num(unit * 0.6)
    );
    let snap = Snapshot::new(e.positions.clone()).ok();
    if let Some(s) = &snap {
        let c = s.sec();
        let _ = writeln!(
            out,
            "<circle class=\"sec\" cx=\"{}\" cy=\"{}\" r=\"{}\" stroke=\"#7a7a7a\"/>",
            num(c.center.x),
            num(c.center.y),
            num(c.radius)
        );
        if asynchronous {
            if let Ok(cells) = make_cells(s) {
                for cell in &cells.cells {
                    let tip = c.center + Point::new(cell.from_ray.cos(), cell.from_ray.sin()) * c.radius;
                    let _ = writeln!(
                        out,
                        "<line class=\"ray\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#c8c8c8\"/>",
                        num(c.center.x),
                        num(c.center.y),
                        num(tip.x),
                        num(tip.y)
                    );
                }
            }
        }
    }
    for path in flights.iter().flatten() {
        let _ = writeln!(
            out,
            "<path class=\"flight\" d=\"{}\" stroke=\"#1f6fb2\" stroke-dasharray=\"{} {}\"/>",
            path_data(path),
            num(unit * 3.0),
            num(unit * 2.0)
        );
    }
    if let Some(s) = &snap {
        for group in coincidence_classes(&e.positions, s.eps()).iter().filter(|g| g.len() > 1) {
            let p = e.positions[group[0]];
            let _ = writeln!(
                out,
                "<circle class=\"multiplicity\" cx=\"{}\" cy=\"{}\" r=\"{}\" stroke=\"#c0392b\" stroke-width=\"{}\"/>",
                num(p.x),
                num(p.y),
                num(unit * (3.0 + group.len() as f64)),
                num(unit * 1.2)
            );
        }
    }
    for (r, p) in e.positions.iter().enumerate() {
        let fill = if crashed.get(r).copied().unwrap_or(false) { "#c0392b" } else { "#111111" };
        let _ = writeln!(
            out,
            "<circle class=\"robot\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{fill}\"/>",
            num(p.x),
            num(p.y),
            num(unit * 1.8)
        );
    }
    out.push_str("</g>\n");
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"{}\">#{index} t={} {:?}</text>",
        num(b.min.x + 2.0 * unit),
        num(-b.max.y + 8.0 * unit),
        num(unit * 6.0),
        num(e.t),
        e.kind
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, AdversaryKind, RunConfig, Scheduler};
    use crate::protocols::Protocol;

    fn three() -> Vec<TraceEvent> {
        let cfg = RunConfig::new(Scheduler::Ssync, Protocol::GatherK, AdversaryKind::Benign);
        let pts = [(0.0, 0.0), (1.0, 0.0), (0.3, 0.8)].map(|(x, y)| Point::new(x, y));
        run(&pts, &cfg).trace.events
    }

    #[test]
    fn frame_count_matches_sampling() {
        let events = three();
        for every in [1, 2, 3, 7, 1000] {
            assert_eq!(render_frames(&events, every).len(), events.len().div_ceil(every));
        }
        assert!(render_frames(&[], 5).is_empty());
    }

    #[test]
    fn output_is_reproducible() {
        let events = three();
        assert_eq!(render_frames(&events, 2), render_frames(&events, 2));
    }

    #[test]
    fn negative_zero_is_folded() {
        assert_eq!(num(-0.0), "0.000000");
        assert_eq!(num(-1e-9), "0.000000");
        assert_eq!(num(-0.5), "-0.500000");
    }
}
