mod render;

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use brickreg::config::{apply_setting, parse_config};
use brickreg::metrics::View;
use brickreg::model::{parse_model, Aabb, ModelFormat};
use brickreg::plan::{self, InstructionPlan, PartViz, PLAN_EXTENSION};
use brickreg::runtime::{self, check_invariants, parse_script, Event, Mode, RuntimeState};
use brickreg::sequencer::{plan_with_draft, SequencerConfig, SequencerError};
use brickreg::tracking::{reprojection_gap, CameraModel, Pose, TrackerParams, LDU_MM};
use clap::{Parser, Subcommand};

/// Process exit status; the numbers are part of the interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok = 0,
    Invalid = 1,
    Usage = 2,
    Internal = 3,
}

struct Failure {
    status: Status,
    error: anyhow::Error,
}

trait OrFail<T> {
    fn or_fail(self, status: Status) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> OrFail<T> for Result<T, E> {
    fn or_fail(self, status: Status) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            status,
            error: e.into(),
        })
    }
}

fn fail<T>(status: Status, error: anyhow::Error) -> Result<T, Failure> {
    Err(Failure { status, error })
}

#[derive(Parser)]
#[command(name = "brickreg", version, about = "Plan, check and replay phased brick-assembly instructions")]
struct Cli {
    /// key = value file with sequencer and tracker settings
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Seed for the order search (overrides the config file)
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Override one setting, e.g. `--set t_max=60` (repeatable)
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sequence a model and write its plan
    Plan {
        /// Native (.txt) or LDraw (.ldr/.mpd) model
        model: PathBuf,
        /// Output path (default: next to the model with a .plan.json extension)
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Check a plan file's structure
    Validate {
        plan: PathBuf,
        /// Also flag phases longer than this many steps
        #[arg(long)]
        t_max: Option<usize>,
    },
    /// Replay an event script and print the trace as JSON lines
    Simulate { plan: PathBuf, script: PathBuf },
    /// Drive a plan interactively from standard input
    Step { plan: PathBuf },
    /// Write an SVG preview of one step
    Render {
        plan: PathBuf,
        #[arg(long)]
        step: usize,
        /// front, right, back, left, top, iso, or AZIMUTH:ELEVATION in degrees
        #[arg(long, default_value = "iso")]
        view: String,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Pixel gap between a true pose and each estimated pose
    Measure {
        /// Rows of 12 numbers (rotation row-major, then translation in mm);
        /// the first row is the true pose
        poses: PathBuf,
        /// Measure a cube of this size in mm (default 100)
        #[arg(long, conflicts_with = "plan")]
        cube_mm: Option<f64>,
        /// Measure the built prefix of a plan instead
        #[arg(long, requires = "step")]
        plan: Option<PathBuf>,
        #[arg(long, requires = "plan")]
        step: Option<usize>,
        #[arg(long, default_value_t = 1400.0)]
        focal_px: f64,
        #[arg(long, value_name = "X,Y", default_value = "896,414")]
        principal: String,
        #[arg(long, value_name = "W,H", default_value = "1792,828")]
        resolution: String,
        #[arg(long, default_value_t = 11)]
        samples: usize,
    },
}

struct Settings {
    sequencer: SequencerConfig,
    tracker: TrackerParams,
}

fn settings(cli: &Cli) -> Result<Settings, Failure> {
    let mut s = Settings {
        sequencer: SequencerConfig::default(),
        tracker: TrackerParams::default(),
    };
    if let Some(path) = &cli.config {
        let text = read(path)?;
        parse_config(&text, &mut s.sequencer, &mut s.tracker)
            .with_context(|| format!("{}", path.display()))
            .or_fail(Status::Usage)?;
    }
    for o in &cli.overrides {
        let Some((k, v)) = o.split_once('=') else {
            return fail(Status::Usage, anyhow!("--set expects KEY=VALUE, got `{o}`"));
        };
        apply_setting(k, v, &mut s.sequencer, &mut s.tracker)
            .map_err(|e| anyhow!("--set {o}: {e}"))
            .or_fail(Status::Usage)?;
    }
    if let Some(seed) = cli.seed {
        s.sequencer.seed = seed;
    }
    Ok(s)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .or_fail(Status::Usage)
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .with_context(|| format!("cannot write {}", path.display()))
        .or_fail(Status::Internal)
}

fn load_plan(path: &Path) -> Result<InstructionPlan, Failure> {
    let text = read(path)?;
    plan::deserialize(&text)
        .with_context(|| format!("{}", path.display()))
        .or_fail(Status::Invalid)
}

fn fmt_score(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"))
}

fn cmd_plan(model_path: &Path, out: Option<PathBuf>, s: &Settings) -> Result<(), Failure> {
    let text = read(model_path)?;
    let model = parse_model(&text, ModelFormat::from_path(model_path))
        .with_context(|| format!("{}", model_path.display()))
        .or_fail(Status::Invalid)?;
    let (plan, draft) = plan_with_draft(&model, &s.sequencer)
        .map_err(|e| {
            let status = match e {
                SequencerError::InvalidConfig(_) => Status::Usage,
                SequencerError::InvalidPlan(_) => Status::Internal,
                _ => Status::Invalid,
            };
            Failure {
                status,
                error: anyhow::Error::new(e).context(model_path.display().to_string()),
            }
        })?;
    let json = plan::serialize(&plan).or_fail(Status::Internal)?;
    let out = out.unwrap_or_else(|| {
        let stem = model_path.file_stem().unwrap_or_default().to_string_lossy();
        model_path.with_file_name(format!("{stem}{PLAN_EXTENSION}"))
    });
    write(&out, &json)?;

    println!(
        "{} parts, ground plane + {} model-target phase(s) -> {}",
        plan.part_count,
        plan.phases.len(),
        out.display()
    );
    println!("{:>5} {:>6} {:>6} {:>9} {:>12} {:>13}", "phase", "start", "end", "symmetry", "distinctness", "confusability");
    println!("{:>5} {:>6} {:>6} {:>9} {:>12} {:>13}", 1, 1, plan.bootstrap.last_step, "-", "-", "-");
    for (p, sc) in plan.phases.iter().zip(&draft.phase_scores) {
        println!(
            "{:>5} {:>6} {:>6} {:>9} {:>12} {:>13}",
            p.phase_id,
            p.start_step,
            p.end_step,
            fmt_score(Some(sc.symmetry)),
            fmt_score(Some(sc.distinctness)),
            fmt_score(sc.confusability)
        );
    }
    Ok(())
}

fn cmd_validate(path: &Path, t_max: Option<usize>) -> Result<(), Failure> {
    let plan = load_plan(path)?;
    let violations = match t_max {
        Some(t) => plan::validate_plan_with_tolerance(&plan, t),
        None => plan::validate_plan(&plan),
    };
    if violations.is_empty() {
        println!(
            "ok: {} steps, bootstrap 1..{}, {} model-target phase(s)",
            plan.part_count,
            plan.bootstrap.last_step,
            plan.phases.len()
        );
        return Ok(());
    }
    for v in &violations {
        println!("{v}");
    }
    fail(Status::Invalid, anyhow!("{}: {} violation(s)", path.display(), violations.len()))
}

fn cmd_simulate(plan_path: &Path, script_path: &Path) -> Result<(), Failure> {
    let plan = load_plan(plan_path)?;
    let script = read(script_path)?;
    let events = parse_script(&script)
        .with_context(|| format!("{}", script_path.display()))
        .or_fail(Status::Usage)?;
    let (records, failure) = match runtime::trace(&plan, &events) {
        Ok(r) => (r, None),
        Err(e) => (e.records.clone(), Some(e)),
    };
    let mut stdout = io::stdout().lock();
    stdout
        .write_all(runtime::trace_to_jsonl(&records).as_bytes())
        .or_fail(Status::Internal)?;
    if let Some(e) = failure {
        return fail(Status::Invalid, anyhow!("{}: event {}: {}", script_path.display(), e.index, e.source));
    }
    for r in &records {
        let broken = check_invariants(&r.state, &plan);
        if !broken.is_empty() {
            let at = r.index.map_or_else(|| "initial state".to_string(), |i| format!("event {i}"));
            return fail(Status::Invalid, anyhow!("{at}: invariant violated: {}", broken.join("; ")));
        }
    }
    Ok(())
}

fn span(steps: &[usize]) -> String {
    match (steps.first(), steps.last()) {
        (Some(a), Some(b)) if a == b => a.to_string(),
        (Some(a), Some(b)) => format!("{a}-{b}"),
        _ => "none".to_string(),
    }
}

fn describe(state: &RuntimeState, plan: &InstructionPlan) -> String {
    let mode = match state.mode {
        Mode::AwaitingAnchor => "awaiting anchor".to_string(),
        Mode::Bootstrapped => "ground plane".to_string(),
        Mode::Tracking(p) => format!("tracking {p}"),
        Mode::Lost(p) => format!("lost {p}"),
    };
    let states = state.viz.states();
    let steps_with = |want: PartViz| -> Vec<usize> {
        (1..=states.len()).filter(|&i| states[i - 1] == want).collect()
    };
    let previous = if state.wireframe_visible {
        span(&steps_with(PartViz::WireframePrevious))
    } else {
        "off".to_string()
    };
    format!(
        "step {}/{} phase {} targets {:?} mode {} | wireframe {} current {} hidden {}",
        state.step,
        plan.part_count,
        plan.phase_of(state.step),
        state.active_targets,
        mode,
        previous,
        state.step,
        span(&steps_with(PartViz::Hidden))
    )
}

fn cmd_step(plan_path: &Path) -> Result<(), Failure> {
    let plan = load_plan(plan_path)?;
    let (mut state, _) = runtime::init(&plan).or_fail(Status::Invalid)?;
    (state, _) = runtime::apply(&state, Event::AnchorPlaced, &plan).or_fail(Status::Internal)?;
    let mut out = io::stdout().lock();
    let mut say = |line: String| writeln!(out, "{line}").or_fail(Status::Internal);
    say("keys: n next, p previous, w wireframe, r <id> recognized, l lost, q quit".to_string())?;
    say(describe(&state, &plan))?;
    for line in io::stdin().lock().lines() {
        let line = line.or_fail(Status::Internal)?;
        let mut words = line.split_whitespace();
        let event = match (words.next(), words.next()) {
            (None, _) => continue,
            (Some("q"), _) => break,
            (Some("n"), None) => Event::Next,
            (Some("p"), None) => Event::Prev,
            (Some("w"), None) => Event::ToggleWireframe,
            (Some("l"), None) => Event::TrackingLost,
            (Some("r"), Some(id)) => match id.parse() {
                Ok(id) => Event::TargetRecognized(id),
                Err(_) => {
                    say(format!("error: invalid phase id `{id}`"))?;
                    continue;
                }
            },
            _ => {
                say(format!("error: unknown command `{}`", line.trim()))?;
                continue;
            }
        };
        match runtime::apply(&state, event, &plan) {
            Ok((next, directives)) => {
                for d in directives {
                    if let runtime::Directive::Warn(w) = d {
                        say(format!("warning: {w}"))?;
                    }
                }
                state = next;
                say(describe(&state, &plan))?;
            }
            Err(e) => say(format!("error: {e}"))?,
        }
    }
    let json = serde_json::to_string(&state).or_fail(Status::Internal)?;
    say(format!("final {json}"))
}

fn cmd_render(plan_path: &Path, step: usize, view: &str, out: &Path) -> Result<(), Failure> {
    let plan = load_plan(plan_path)?;
    if !(1..=plan.part_count).contains(&step) {
        return fail(Status::Usage, anyhow!("step {step} outside 1..={}", plan.part_count));
    }
    let Some(view) = View::named(view) else {
        return fail(Status::Usage, anyhow!("unknown view `{view}`"));
    };
    write(out, &render::render_svg(&plan, step, &view))
}

fn pair(text: &str, flag: &str) -> Result<(f64, f64), Failure> {
    let parsed = text
        .split_once(',')
        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
    parsed.ok_or_else(|| Failure {
        status: Status::Usage,
        error: anyhow!("--{flag} expects two comma-separated numbers, got `{text}`"),
    })
}

fn parse_poses(text: &str) -> anyhow::Result<Vec<Pose>> {
    let mut poses = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let nums = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|w| !w.is_empty())
            .map(str::parse::<f64>)
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("line {}: not a number", i + 1))?;
        let row: [f64; 12] = nums
            .try_into()
            .map_err(|v: Vec<f64>| anyhow!("line {}: expected 12 numbers, found {}", i + 1, v.len()))?;
        poses.push(Pose::from_row12(&row).with_context(|| format!("line {}", i + 1))?);
    }
    if poses.len() < 2 {
        bail!("need a true pose and at least one estimated pose, found {} row(s)", poses.len());
    }
    Ok(poses)
}

struct MeasureArgs {
    poses: PathBuf,
    cube_mm: Option<f64>,
    plan: Option<PathBuf>,
    step: Option<usize>,
    camera: CameraModel,
    samples: usize,
}

fn cmd_measure(a: MeasureArgs) -> Result<(), Failure> {
    let poses = parse_poses(&read(&a.poses)?)
        .with_context(|| format!("{}", a.poses.display()))
        .or_fail(Status::Invalid)?;
    let boxes: Vec<Aabb> = match (&a.plan, a.step) {
        (Some(path), Some(step)) => {
            let plan = load_plan(path)?;
            if !(1..=plan.part_count).contains(&step) {
                return fail(Status::Usage, anyhow!("step {step} outside 1..={}", plan.part_count));
            }
            plan.steps[..step].iter().map(|s| s.world_box()).collect()
        }
        _ => {
            let size = a.cube_mm.unwrap_or(100.0);
            if size.is_nan() || size <= 0.0 {
                return fail(Status::Usage, anyhow!("--cube-mm must be positive"));
            }
            let h = (size / LDU_MM / 2.0).round() as i64;
            vec![Aabb {
                min: [-h, -h, 0],
                max: [h, h, 2 * h],
            }]
        }
    };
    a.camera.validate().or_fail(Status::Usage)?;
    for est in &poses[1..] {
        let g = reprojection_gap(&poses[0], est, &a.camera, &boxes, a.samples).or_fail(Status::Invalid)?;
        println!("mean {:.3} max {:.3}", g.mean_px, g.max_px);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let s = settings(&cli)?;
    match cli.command {
        Command::Plan { model, out } => cmd_plan(&model, out, &s),
        Command::Validate { plan, t_max } => cmd_validate(&plan, t_max),
        Command::Simulate { plan, script } => cmd_simulate(&plan, &script),
        Command::Step { plan } => cmd_step(&plan),
        Command::Render { plan, step, view, out } => cmd_render(&plan, step, &view, &out),
        Command::Measure {
            poses,
            cube_mm,
            plan,
            step,
            focal_px,
            principal,
            resolution,
            samples,
        } => {
            let (w, h) = pair(&resolution, "resolution")?;
            let camera = CameraModel {
                focal_px,
                principal_point: pair(&principal, "principal")?,
                resolution: (w as u32, h as u32),
            };
            cmd_measure(MeasureArgs {
                poses,
                cube_mm,
                plan,
                step,
                camera,
                samples,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Status::Usage as u8 } else { Status::Ok as u8 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(Status::Ok as u8),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.status as u8)
        }
    }
}
