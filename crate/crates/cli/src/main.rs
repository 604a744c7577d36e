use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use crashgather::batch::{run_batch, BatchSpec, Family, FaultCounts};
use crashgather::engine::{AdversaryKind, Scheduler, Trace, TraceEvent};
use crashgather::protocols::Protocol;
use crashgather::render::render_frames;
use crashgather::scenario::{bundled_names, bundled_source, Scenario};

#[derive(Parser)]
#[command(name = "crashgather", version, about = "Crash-tolerant gathering simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario, writing its trace and invariant report.
    Run(RunArgs),
    /// Run a seeded experiment grid and print a summary table.
    Batch(BatchArgs),
    /// Render a trace as a sequence of SVG frames.
    Render(RenderArgs),
    /// Check a scenario file against the schema and admissibility rules.
    Validate(ScenarioSource),
}

#[derive(Args)]
struct ScenarioSource {
    /// Scenario JSON file.
    #[arg(long, conflicts_with = "bundled", required_unless_present_any = ["bundled", "list"])]
    scenario: Option<PathBuf>,
    /// Name of a bundled scenario.
    #[arg(long)]
    bundled: Option<String>,
    /// List the bundled scenarios and exit.
    #[arg(long)]
    list: bool,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Jsonl,
    Json,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: ScenarioSource,
    /// Output directory for trace and report.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the scenario budget (rounds or time units).
    #[arg(long)]
    budget: Option<f64>,
    /// Trace format: one event per line, or a single document with metadata.
    #[arg(long, value_enum, default_value = "jsonl")]
    format: Format,
}

#[derive(Copy, Clone, ValueEnum)]
enum Mode {
    Ssync,
    AsyncIc,
}

#[derive(Args)]
struct BatchArgs {
    #[arg(long, value_enum, default_value = "ssync")]
    mode: Mode,
    /// Robot counts, as a range `3..8` (inclusive) or a list `3,5,7`.
    #[arg(long, default_value = "3..8")]
    n: String,
    /// Fault counts: `all`, `max` or a list such as `0,1`.
    #[arg(long, default_value = "max")]
    faults: String,
    /// Adversaries, comma separated.
    #[arg(long, default_value = "benign,uniform_random,greedy_minimal")]
    adversary: String,
    /// Initial configuration family.
    #[arg(long, default_value = "disc")]
    family: String,
    /// Runs per (n, f, adversary) cell.
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    /// Base seed of the batch.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e4)]
    budget: f64,
    /// Write the full batch report as JSON into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    /// Trace file in either format written by `run`.
    #[arg(long)]
    trace: PathBuf,
    /// Render one frame every N events.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    every: u64,
    #[arg(long, default_value = "frames")]
    out: PathBuf,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Check(String),
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Batch(a) => cmd_batch(a),
        Command::Render(a) => cmd_render(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load(source: &ScenarioSource) -> Result<Option<Scenario>> {
    if source.list {
        for name in bundled_names() {
            println!("{name}");
        }
        return Ok(None);
    }
    let (text, origin) = match (&source.scenario, &source.bundled) {
        (Some(path), _) => (
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
            path.display().to_string(),
        ),
        (None, Some(name)) => match bundled_source(name) {
            Some(t) => (t.to_string(), name.clone()),
            None => bail!("no bundled scenario named {name:?}; try --list"),
        },
        (None, None) => bail!("either --scenario or --bundled is required"),
    };
    Scenario::from_json(&text).map(Some).map_err(|e| anyhow::Error::new(e).context(origin))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn cmd_validate(source: ScenarioSource) -> Result<(), Failure> {
    if let Some(s) = load(&source)? {
        println!("{}: ok ({} robots, {:?}, {:?})", s.name, s.n(), s.scheduler, s.protocol);
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let Some(mut scenario) = load(&args.source)? else { return Ok(()) };
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    if let Some(budget) = args.budget {
        scenario.budget = budget;
    }
    scenario.validate().map_err(anyhow::Error::new)?;
    let run = scenario.run();
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let trace_path = match args.format {
        Format::Jsonl => {
            let p = args.out.join("trace.jsonl");
            write(&p, &run.trace.to_jsonl())?;
            p
        }
        Format::Json => {
            let p = args.out.join("trace.json");
            write(&p, &serde_json::to_string(&run.trace).context("serialising trace")?)?;
            p
        }
    };
    let report = serde_json::json!({
        "scenario": scenario.name,
        "seed": scenario.seed,
        "outcome": run.outcome,
        "expect": scenario.expect,
        "expectation_met": run.expectation_met,
        "checks": run.report,
    });
    let report_path = args.out.join("report.json");
    write(&report_path, &serde_json::to_string_pretty(&report).context("serialising report")?)?;
    println!(
        "{}: {} after {} events; checks failed: {:?}",
        scenario.name,
        run.outcome.label(),
        run.trace.events.len(),
        run.report.failed()
    );
    println!("trace  {}\nreport {}", trace_path.display(), report_path.display());
    if run.expectation_met {
        Ok(())
    } else {
        Err(Failure::Check(format!("{}: expectation {:?} not met", scenario.name, scenario.expect)))
    }
}

fn parse_ns(s: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
        if a > b {
            bail!("empty range {s}");
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| x.trim().parse().with_context(|| format!("bad robot count {x:?}"))).collect()
}

fn parse_named<T: serde::de::DeserializeOwned>(s: &str, what: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(s.trim().replace('-', "_")))
        .with_context(|| format!("unknown {what} {s:?}"))
}

fn cmd_batch(args: BatchArgs) -> Result<(), Failure> {
    let (scheduler, protocol) = match args.mode {
        Mode::Ssync => (Scheduler::Ssync, Protocol::GatherK),
        Mode::AsyncIc => (Scheduler::AsyncIc, Protocol::AsyncGather),
    };
    let mut spec = BatchSpec::new(scheduler, protocol, parse_ns(&args.n)?);
    spec.faults = match args.faults.as_str() {
        "all" => FaultCounts::All,
        "max" => FaultCounts::Max,
        list => FaultCounts::List(
            list.split(',')
                .map(|x| x.trim().parse().with_context(|| format!("bad fault count {x:?}")))
                .collect::<Result<_>>()?,
        ),
    };
    spec.adversaries = args
        .adversary
        .split(',')
        .map(|a| parse_named::<AdversaryKind>(a, "adversary"))
        .collect::<Result<_>>()?;
    spec.family = parse_named::<Family>(&args.family, "family")?;
    spec.seeds = args.seeds;
    spec.base_seed = args.seed;
    spec.budget = args.budget;
    let report = run_batch(&spec);
    print!("{}", report.table());
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let json = serde_json::to_string_pretty(&report).context("serialising batch report")?;
        write(&dir.join("batch.json"), &json)?;
    }
    if let Some(r) = report.records.iter().find_map(|r| r.rejected.as_ref()) {
        return Err(Failure::Usage(anyhow::anyhow!("generated scenarios rejected: {r}")));
    }
    if report.all_gathered() && report.all_checks_pass() {
        Ok(())
    } else {
        Err(Failure::Check("some runs did not gather or failed a check".into()))
    }
}

fn read_trace(path: &Path) -> Result<Vec<TraceEvent>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let trimmed = text.trim_start();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    if let Ok(trace) = serde_json::from_str::<Trace>(trimmed) {
        return Ok(trace.events);
    }
    Trace::events_from_jsonl(&text).with_context(|| format!("parsing trace {}", path.display()))
}

fn cmd_render(args: RenderArgs) -> Result<(), Failure> {
    let events = read_trace(&args.trace)?;
    let frames = render_frames(&events, args.every as usize);
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    for (i, svg) in frames.iter().enumerate() {
        write(&args.out.join(format!("frame_{i:05}.svg")), svg)?;
    }
    println!("{} frames from {} events in {}", frames.len(), events.len(), args.out.display());
    Ok(())
}
