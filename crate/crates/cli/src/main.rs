//! `radlim`: build Scherk domains, check them, solve, classify radial limits
//! and run the iterated example.

mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use radlim_core::domains::{
    attach_trapezoids, check_admissible, iterate_example, ExampleSchedule, GeometryOnly, ScherkPolygon,
};
use radlim_core::example::{run_example, ExampleConfig};
use radlim_core::fatou::{check_hypotheses, fatou_report, RayParams};
use radlim_core::solver::{
    check_caps, solve, solve_scherk, triangulate, BoundaryData, Domain, Field, OperatorSpec, SolveParams,
    Variant,
};
use radlim_core::{DiscSpec, Error, MetricModel, Point};

/// Environment variable fixing the number of worker threads.
const WORKERS_ENV: &str = "RADLIM_WORKERS";

#[derive(Parser)]
#[command(name = "radlim", version, about = "Scherk domains, capped minimal graph solves and radial limits")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the first quadrilateral or a later domain of the sequence.
    BuildDomain(BuildArgs),
    /// Admissibility report for a domain JSON.
    Check(CheckArgs),
    /// Solve on a domain JSON (capped infinite data) or on the whole disc.
    Solve(SolveArgs),
    /// Solve, then write the hypothesis and radial-limit reports.
    Fatou(FatouArgs),
    /// Run the iterated construction with solves and reports at each step.
    Example(ExampleArgs),
    /// Draw a domain, optionally over a field CSV.
    Render(RenderArgs),
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long, default_value = "hyperbolic")]
    model: String,
    /// Boundary parameter of the basepoint.
    #[arg(long, default_value_t = 0.0)]
    x0: f64,
    #[arg(long, default_value_t = 1)]
    steps: usize,
    #[arg(long = "tau-max", default_value_t = 0.1)]
    tau_max: f64,
    /// Emit the last step before the perturbation (trapezoids attached only).
    #[arg(long)]
    unperturbed: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct SolveArgs {
    /// Domain JSON; without it the whole disc is solved.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value = "hyperbolic")]
    model: String,
    /// minimal_euclidean, minimal_hyperbolic, heisenberg_killing or harmonic.
    #[arg(long)]
    variant: Option<String>,
    /// Disc boundary data: zero, cos, cos3, xy or a number.
    #[arg(long, default_value = "zero")]
    bc: String,
    #[arg(long, default_value = "5,10,20,40")]
    caps: String,
    #[arg(long, default_value_t = 0.02)]
    h: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct FatouArgs {
    #[command(flatten)]
    solve: SolveArgs,
    #[arg(long, default_value_t = 256)]
    rays: usize,
    #[arg(long, default_value_t = 0.3)]
    delta: f64,
}

#[derive(Args)]
struct ExampleArgs {
    #[arg(long, default_value = "hyperbolic")]
    model: String,
    #[arg(long, default_value_t = 0.0)]
    x0: f64,
    #[arg(long, default_value_t = 3)]
    steps: usize,
    #[arg(long, default_value = "5,10,20,40")]
    caps: String,
    #[arg(long, default_value_t = 0.02)]
    h: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 256)]
    rays: usize,
    #[arg(long = "tau-max", default_value_t = 0.1)]
    tau_max: f64,
    #[arg(long = "r-core", default_value_t = 0.9)]
    r_core: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Field CSV (`x,y,u,ux,uy`) drawn as a heatmap under the domain.
    #[arg(long)]
    field: Option<PathBuf>,
    #[arg(long, default_value = "domain.svg")]
    out: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
    /// Outputs were written but some solve stagnated.
    Stagnated(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(e.into())
    }
}

type Res<T = ()> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = workers().and_then(|_| run(cli.cmd)) {
        let (msg, code) = match f {
            Failure::Usage(m) => (m, 2),
            Failure::Core(e) if e.is_non_convergence() => (e.to_string(), 3),
            Failure::Core(e) => (e.to_string(), 2),
            Failure::Stagnated(m) => (m, 3),
        };
        eprintln!("radlim: {msg}");
        return ExitCode::from(code);
    }
    ExitCode::SUCCESS
}

fn workers() -> Res {
    let Ok(v) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("{WORKERS_ENV} must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage(e.to_string()))
}

fn run(cmd: Cmd) -> Res {
    match cmd {
        Cmd::BuildDomain(a) => build_domain(a),
        Cmd::Check(a) => check(a),
        Cmd::Solve(a) => solve_cmd(a).map(|_| ()),
        Cmd::Fatou(a) => fatou_cmd(a),
        Cmd::Example(a) => example(a),
        Cmd::Render(a) => render(a),
    }
}

fn model(name: &str) -> Res<MetricModel> {
    MetricModel::parse(name).map_err(|e| usage(e.to_string()))
}

fn parse_caps(s: &str) -> Res<Vec<f64>> {
    let caps = s
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|_| usage(format!("bad cap {c:?}"))))
        .collect::<Res<Vec<_>>>()?;
    check_caps(&caps).map_err(|e| usage(e.to_string()))?;
    Ok(caps)
}

fn positive(name: &str, v: f64) -> Res {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("--{name} must be positive, got {v}")))
    }
}

fn write(dir: &Path, name: &str, text: &str) -> Res {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn pretty(v: &impl serde::Serialize) -> Res<String> {
    Ok(serde_json::to_string_pretty(v).map_err(Error::from)? + "\n")
}

fn read_domain(path: &Path) -> Res<ScherkPolygon> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    ScherkPolygon::from_json_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn build_domain(a: BuildArgs) -> Res {
    let disc = DiscSpec::new(model(&a.model)?);
    positive("tau-max", a.tau_max)?;
    if a.steps == 0 {
        return Err(usage("--steps must be at least 1"));
    }
    if a.unperturbed && a.steps < 2 {
        return Err(usage("--unperturbed needs --steps 2 or more"));
    }
    let schedule = ExampleSchedule {
        x0_s: a.x0,
        tau_max: a.tau_max,
        ..ExampleSchedule::default()
    };
    let seq = iterate_example(&disc, a.steps, &schedule, &mut GeometryOnly)?;
    let last = seq.steps.last().expect("at least one step");
    let domain = match (a.unperturbed, last.attached_sides) {
        (true, Some((ia, ib))) => attach_trapezoids(&seq.steps[a.steps - 2].domain, ia, ib)?.domain,
        _ => last.domain.clone(),
    };
    write(&a.out, "domain.json", &domain.to_json_string()?)?;
    write(&a.out, "domain.svg", &svg::render(&domain, None))?;
    println!("{} sides, condition 1 residual {:.3e}", domain.len(), domain.condition1_residual());
    Ok(())
}

fn check(a: CheckArgs) -> Res {
    positive("tol", a.tol)?;
    let d = read_domain(&a.input)?;
    let r = check_admissible(&d, a.tol).map_err(|e| usage(e.to_string()))?;
    write(&a.out, "admissibility.json", &r.to_json()?)?;
    println!(
        "passes={} slack_a={:.6e} slack_b={:.6e} worst={:?}",
        r.passes, r.slack_a, r.slack_b, r.worst_polygon
    );
    Ok(())
}

fn disc_bc(name: &str) -> Res<BoundaryData> {
    let f: Arc<dyn Fn(Point) -> f64 + Send + Sync> = match name {
        "zero" => return Ok(BoundaryData::constant(1, 0.0)),
        "cos" => Arc::new(|p: Point| p.angle().cos()),
        "cos3" => Arc::new(|p: Point| (3.0 * p.angle()).cos()),
        "xy" => Arc::new(|p: Point| p.x * p.y),
        other => {
            let v: f64 = other.parse().map_err(|_| usage(format!("unknown --bc {other:?}")))?;
            return Ok(BoundaryData::constant(1, v));
        }
    };
    Ok(BoundaryData::function(1, f))
}

struct Solved {
    fields: Vec<Field>,
    caps: Option<Vec<f64>>,
    op: OperatorSpec,
}

fn solve_cmd(a: SolveArgs) -> Res<Solved> {
    positive("h", a.h)?;
    positive("tol", a.tol)?;
    let params = SolveParams {
        tol: a.tol,
        ..SolveParams::default()
    };
    let domain = a.input.as_deref().map(read_domain).transpose()?;
    let m = match &domain {
        Some(d) => d.model(),
        None => model(&a.model)?,
    };
    let variant = match &a.variant {
        Some(v) => Variant::parse(v).map_err(|e| usage(e.to_string()))?,
        None if m == MetricModel::Hyperbolic => Variant::MinimalHyperbolic,
        None => Variant::MinimalEuclidean,
    };
    let op = OperatorSpec::new(variant, m).map_err(|e| usage(e.to_string()))?;
    let (fields, caps) = match &domain {
        Some(d) => {
            let caps = parse_caps(&a.caps)?;
            (solve_scherk(d, &op, &caps, a.h, &params)?, Some(caps))
        }
        None => {
            let mesh = Arc::new(triangulate(Domain::Disc(&DiscSpec::new(m)), a.h)?);
            (vec![solve(&mesh, &op, &disc_bc(&a.bc)?, &params)?], None)
        }
    };
    let last = fields.last().expect("one field per cap");
    write(&a.out, "field.csv", &last.to_csv())?;
    let logs: Vec<serde_json::Value> = fields
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let log: serde_json::Value = serde_json::from_str(&f.log_json()?)?;
            Ok(json!({"cap": caps.as_ref().map(|c| c[k]), "log": log}))
        })
        .collect::<radlim_core::Result<_>>()?;
    write(&a.out, "solve_log.json", &pretty(&logs)?)?;
    println!(
        "{} nodes, {} triangles, newton iterations {:?}",
        last.mesh.n_nodes(),
        last.mesh.triangles.len(),
        fields.iter().map(|f| f.log.newton_iters).collect::<Vec<_>>()
    );
    if let Some(k) = fields.iter().position(|f| !f.log.converged) {
        let cap = caps.as_ref().map_or(String::new(), |c| format!(" at cap {}", c[k]));
        return Err(Failure::Stagnated(format!(
            "newton stagnated{cap} with residual {:e}",
            fields[k].log.final_residual()
        )));
    }
    Ok(Solved { fields, caps, op })
}

fn fatou_cmd(a: FatouArgs) -> Res {
    positive("delta", a.delta)?;
    let out = a.solve.out.clone();
    let s = solve_cmd(a.solve)?;
    let field = s.fields.last().expect("one field per cap");
    let params = match &s.caps {
        Some(c) => RayParams::for_cap(*c.last().expect("caps checked")),
        None => RayParams::default(),
    };
    let report = fatou_report(field, a.rays, &params).map_err(|e| usage(e.to_string()))?;
    write(&out, "fatou.json", &(report.to_json()? + "\n"))?;
    if s.caps.is_none() {
        let hyp = check_hypotheses(field, &s.op, a.delta, [0.5, 1.0])?;
        write(&out, "hypotheses.json", &(hyp.to_json()? + "\n"))?;
        println!("hypotheses a={} b={} c={}", hyp.verdicts.a, hyp.verdicts.b, hyp.verdicts.c);
    }
    println!(
        "mu_finite={:.6} mu_plus={:.6} mu_minus={:.6} mu_und={:.6}",
        report.mu_finite, report.mu_plus, report.mu_minus, report.mu_und
    );
    Ok(())
}

fn example(a: ExampleArgs) -> Res {
    let disc = DiscSpec::new(model(&a.model)?);
    for (name, v) in [("h", a.h), ("tol", a.tol), ("tau-max", a.tau_max)] {
        positive(name, v)?;
    }
    if !(a.r_core > 0.0 && a.r_core < disc.geodesic_radius) {
        return Err(usage(format!("--r-core must lie in (0, {}), got {}", disc.geodesic_radius, a.r_core)));
    }
    if a.steps == 0 {
        return Err(usage("--steps must be at least 1"));
    }
    let caps = parse_caps(&a.caps)?;
    let config = ExampleConfig {
        steps: a.steps,
        h: a.h,
        n_rays: a.rays,
        schedule: ExampleSchedule {
            x0_s: a.x0,
            tau_max: a.tau_max,
            r0: a.r_core,
            ..ExampleSchedule::default()
        },
        solve: SolveParams {
            tol: a.tol,
            ..SolveParams::default()
        },
    };
    let run = run_example(&disc, &config, &caps).map_err(|e| match e.root() {
        Error::Invalid(_) => usage(e.to_string()),
        _ => Failure::Core(e),
    })?;
    for (st, r) in run.sequence.steps.iter().zip(&run.reports) {
        let dir = a.out.join(format!("step_{}", st.step));
        write(&dir, "manifest.json", &pretty(&r.manifest)?)?;
        write(&dir, "report.json", &pretty(r)?)?;
        write(&dir, "fatou.json", &(r.fatou.to_json()? + "\n"))?;
        write(&dir, "domain.json", &st.domain.to_json_string()?)?;
        let field = st.solution.last().expect("one field per cap");
        write(&dir, "field.csv", &field.to_csv())?;
        let samples: Vec<(Point, f64)> = field.mesh.nodes.iter().copied().zip(field.values.iter().copied()).collect();
        write(&dir, "domain.svg", &svg::render(&st.domain, Some(&samples)))?;
        println!(
            "step {}: {} sides, tau {}, mu_finite {:.6}, mu_plus {:.6}, mu_minus {:.6}, cap gaps {:?}",
            st.step,
            st.domain.len(),
            st.tau.map_or("-".into(), |t| format!("{t:.3e}")),
            r.fatou.mu_finite,
            r.fatou.mu_plus,
            r.fatou.mu_minus,
            r.cap_gaps
        );
    }
    let summary = json!({
        "config": config,
        "caps": caps,
        "mu_finite": run.mu_finite(),
        "center_value": run.sequence.center_value,
    });
    write(&a.out, "summary.json", &pretty(&summary)?)?;
    Ok(())
}

fn read_field(path: &Path) -> Res<Vec<(Point, f64)>> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let bad = |n: usize| usage(format!("{}: malformed line {n}", path.display()));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim().starts_with("x,y,u") => {}
        _ => return Err(usage(format!("{}: expected an x,y,u header", path.display()))),
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            let v: Vec<f64> = l.split(',').map(|c| c.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad(n + 1))?;
            if v.len() < 3 {
                return Err(bad(n + 1));
            }
            Ok((Point::new(v[0], v[1]), v[2]))
        })
        .collect()
}

fn render(a: RenderArgs) -> Res {
    let d = read_domain(&a.input)?;
    let field = a.field.as_deref().map(read_field).transpose()?;
    let doc = svg::render(&d, field.as_deref());
    if let Some(dir) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(&a.out, doc)?;
    Ok(())
}
