//! `subwalk`: batch front-end for the subwalk library.
//!
//! Every command prints one JSON document on stdout holding the resolved
//! configuration and the result. Exit codes: 0 success, 2 bad parameters,
//! 3 resource or numerical failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use subwalk::capacity::CapacitySolver;
use subwalk::kernels::{green_asymptotic, green_quadrature, green_series_adaptive, WalkConfig};
use subwalk::massiveness::{classify, wiener_test, WienerOptions, REPORT_SCHEMA_VERSION};
use subwalk::sets::SetFamily;
use subwalk::simulate::{hitting_curve, simulate_paths, summarize, write_trace_csv, SimulationPlan};
use subwalk::{Dim, Error, FiniteLatticeSet, Point};

/// Environment variable holding the worker-thread count.
const THREADS_VAR: &str = "SUBWALK_THREADS";

#[derive(Parser)]
#[command(name = "subwalk", version, about = "Potential theory of alpha-stable subordinated random walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Green function values.
    Green(GreenArgs),
    /// Capacity of a point list or of one dyadic shell of a family.
    Capacity(CapacityArgs),
    /// Wiener-type series over dyadic shells.
    Wiener(WienerArgs),
    /// Closed-form massiveness verdict.
    Classify(ClassifyArgs),
    /// Monte Carlo hitting probability.
    Simulate(SimulateArgs),
    /// Enumerate or query a set family.
    Sets(SetsArgs),
}

#[derive(Args, Serialize, Clone)]
struct WalkArgs {
    /// Lattice dimension (1 or 2).
    #[arg(short = 'd', long = "dim")]
    dim: usize,
    /// Stability index alpha in (0, 2).
    #[arg(short = 'a', long = "alpha")]
    alpha: f64,
}

impl WalkArgs {
    fn cfg(&self) -> Result<WalkConfig<f64>, Error> {
        WalkConfig::new(dim(self.dim)?, self.alpha)
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Series,
    Quadrature,
    Asymptotic,
    All,
}

#[derive(Args, Serialize)]
struct GreenArgs {
    #[command(flatten)]
    #[serde(flatten)]
    walk: WalkArgs,
    /// Target point, `x` or `x,y`; repeatable.
    #[arg(short = 'x', long = "point", required = true, value_parser = parse_point)]
    points: Vec<Point>,
    #[arg(short, long, value_enum, default_value = "quadrature")]
    method: Method,
    /// Relative tolerance of the adaptive series.
    #[arg(long, default_value_t = 1e-6)]
    rtol: f64,
}

#[derive(Args, Serialize)]
struct CapacityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    walk: WalkArgs,
    /// Points separated by `;`, e.g. `0,0;3,1`.
    #[arg(long, conflicts_with_all = ["family", "shell"], value_delimiter = ';', value_parser = parse_point)]
    points: Vec<Point>,
    #[arg(long, requires = "shell")]
    family: Option<String>,
    /// Dyadic shell index n: members with sup-norm in [2^n, 2^(n+1)).
    #[arg(long, requires = "family")]
    shell: Option<u32>,
    /// Largest set solved exactly; bigger shells are subsampled.
    #[arg(long, default_value_t = subwalk::capacity::DEFAULT_SOLVER_CAP)]
    solver_cap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Include equilibrium weights (point lists only).
    #[arg(long)]
    weights: bool,
}

#[derive(Args, Serialize)]
struct WienerArgs {
    #[command(flatten)]
    #[serde(flatten)]
    walk: WalkArgs,
    #[arg(long)]
    family: String,
    /// Shell range `lo..hi` (inclusive).
    #[arg(long, default_value = "4..18", value_parser = parse_range)]
    shells: (u32, u32),
    #[arg(long, default_value_t = subwalk::capacity::DEFAULT_SOLVER_CAP)]
    solver_cap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report as JSON here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write one CSV row per shell here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ClassifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    walk: WalkArgs,
    #[arg(long)]
    family: String,
}

#[derive(Args, Serialize)]
struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    walk: WalkArgs,
    #[arg(long)]
    family: String,
    #[arg(long, default_value = "0", value_parser = parse_point)]
    start: Point,
    #[arg(long, default_value_t = 1000)]
    paths: usize,
    /// Subordinated steps per path.
    #[arg(long, default_value_t = 1000)]
    horizon: u64,
    /// Extra horizons reported from the same run, comma separated.
    #[arg(long, value_delimiter = ',')]
    horizons: Vec<u64>,
    #[arg(long, default_value_t = 1 << 40)]
    radius_cap: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write per-path outcomes as CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SetsArgs {
    #[arg(long)]
    family: String,
    /// List the members of dyadic shell n.
    #[arg(long, conflicts_with_all = ["prefix", "contains"])]
    shell: Option<u32>,
    /// List the first k positive members of a one-dimensional family.
    #[arg(long, conflicts_with = "contains")]
    prefix: Option<usize>,
    /// Membership test for a point.
    #[arg(long, value_parser = parse_point)]
    contains: Option<Point>,
}

fn parse_point(s: &str) -> Result<Point, String> {
    let coords: Vec<i64> = s
        .split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|e| format!("bad coordinate {c:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match coords[..] {
        [x] => Ok([x, 0]),
        [x, y] => Ok([x, y]),
        _ => Err(format!("point {s:?} needs one or two coordinates")),
    }
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("range {s:?} must look like lo..hi"))?;
    let lo: u32 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: u32 = hi.trim().trim_start_matches('=').parse().map_err(|e| format!("{e}"))?;
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok((lo, hi))
}

fn dim(d: usize) -> Result<Dim, Error> {
    Dim::new(d)
}

fn family(spec: &str) -> Result<SetFamily, Error> {
    spec.parse()
}

fn io_err(e: io::Error) -> Error {
    Error::Resource(e.to_string())
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, Error> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Resource(format!("{}: {e}", path.display())))
}

fn green(args: &GreenArgs) -> Result<Value, Error> {
    let cfg = args.walk.cfg()?;
    cfg.require_transient()?;
    let methods: &[Method] = match args.method {
        Method::All => &[Method::Series, Method::Quadrature, Method::Asymptotic],
        ref m => std::slice::from_ref(m),
    };
    let mut rows = Vec::new();
    for x in &args.points {
        for m in methods {
            let v = match m {
                Method::Series => green_series_adaptive(&cfg, x, args.rtol)?,
                Method::Quadrature => green_quadrature(&cfg, x)?,
                Method::Asymptotic => green_asymptotic(&cfg, x)?,
                Method::All => unreachable!(),
            };
            rows.push(json!({
                "x": x,
                "value": v.estimate(),
                "error_bound": v.abs_error_bound,
                "method": v.method,
            }));
        }
    }
    Ok(Value::Array(rows))
}

fn capacity(args: &CapacityArgs) -> Result<Value, Error> {
    let cfg = args.walk.cfg()?;
    let solver = CapacitySolver::new(cfg)?.with_max_points(args.solver_cap);
    if !args.points.is_empty() {
        let set = FiniteLatticeSet::new(cfg.dim, args.points.clone())?;
        let m = solver.equilibrium_measure(&set)?;
        let bounds = solver.capacity_bounds(&set)?;
        let mut out = json!({
            "size": set.len(),
            "capacity": m.capacity,
            "bounds": bounds,
            "residual": m.residual,
            "min_weight": m.min_weight,
            "condition_estimate": m.condition_estimate,
            "subsampled": false,
        });
        if args.weights {
            out["weights"] = json!(m.weights);
        }
        return Ok(out);
    }
    let (Some(spec), Some(n)) = (&args.family, args.shell) else {
        return Err(Error::Domain("give --points or --family with --shell".into()));
    };
    let fam = family(spec)?;
    if fam.dim() != cfg.dim {
        return Err(Error::Domain(format!("family {fam} does not live in Z^{}", cfg.dim.get())));
    }
    match fam.dyadic_shell(n)? {
        None => Ok(json!({ "size": 0, "capacity": 0.0, "subsampled": false })),
        Some(set) => Ok(serde_json::to_value(solver.shell_capacity(&set, args.seed)?).unwrap()),
    }
}

fn wiener(args: &WienerArgs) -> Result<Value, Error> {
    let cfg = args.walk.cfg()?;
    let fam = family(&args.family)?;
    let opts = WienerOptions {
        solver_cap: args.solver_cap,
        seed: args.seed,
    };
    let report = wiener_test(&cfg, &fam, args.shells.0..=args.shells.1, opts)?;
    if let Some(path) = &args.json {
        report.write_json(create(path)?)?;
    }
    if let Some(path) = &args.csv {
        report.write_csv(create(path)?)?;
    }
    Ok(serde_json::to_value(&report).unwrap())
}

fn classify_cmd(args: &ClassifyArgs) -> Result<Value, Error> {
    let d = dim(args.walk.dim)?;
    let fam = family(&args.family)?;
    Ok(serde_json::to_value(classify(&fam, args.walk.alpha, d)?).unwrap())
}

fn simulate(args: &SimulateArgs) -> Result<Value, Error> {
    let plan = SimulationPlan {
        dim: dim(args.walk.dim)?,
        alpha: args.walk.alpha,
        family: family(&args.family)?,
        start: args.start,
        n_paths: args.paths,
        horizon: args.horizons.iter().copied().chain([args.horizon]).max().unwrap(),
        radius_cap: args.radius_cap,
        seed: args.seed,
    };
    let estimate = if args.trace.is_some() {
        let outcomes = simulate_paths(&plan)?;
        write_trace_csv(&outcomes, create(args.trace.as_ref().unwrap())?)?;
        summarize(&outcomes, args.horizon)
    } else {
        hitting_curve(&plan, &[args.horizon])?[0]
    };
    let mut out = json!({ "plan": plan, "estimate": estimate });
    if !args.horizons.is_empty() {
        out["curve"] = json!(hitting_curve(&plan, &args.horizons)?);
    }
    Ok(out)
}

fn sets(args: &SetsArgs) -> Result<Value, Error> {
    let fam = family(&args.family)?;
    let mut out = json!({ "family": fam.to_string(), "dim": fam.dim().get() });
    if let Some(n) = args.shell {
        let pts = fam.shell_points(n)?;
        out["shell"] = json!(n);
        out["size"] = json!(pts.len());
        out["points"] = json!(pts);
    } else if let Some(k) = args.prefix {
        out["prefix"] = json!(fam.prefix(k)?);
    } else if let Some(p) = args.contains {
        fam.validate()?;
        out["point"] = json!(p);
        out["contains"] = json!(fam.contains(&p));
    } else {
        fam.validate()?;
        out["spec"] = serde_json::to_value(&fam).unwrap();
    }
    Ok(out)
}

fn configure_threads() -> Result<(), Error> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| Error::Domain(format!("{THREADS_VAR}={v:?} is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Internal(e.to_string()))
}

fn run(cli: &Cli) -> Result<Value, Error> {
    configure_threads()?;
    let (name, config, result) = match &cli.command {
        Command::Green(a) => ("green", json!(a), green(a)?),
        Command::Capacity(a) => ("capacity", json!(a), capacity(a)?),
        Command::Wiener(a) => ("wiener", json!(a), wiener(a)?),
        Command::Classify(a) => ("classify", json!(a), classify_cmd(a)?),
        Command::Simulate(a) => ("simulate", json!(a), simulate(a)?),
        Command::Sets(a) => ("sets", json!(a), sets(a)?),
    };
    Ok(json!({
        "schema_version": REPORT_SCHEMA_VERSION,
        "command": name,
        "config": config,
        "threads": rayon::current_num_threads(),
        "result": result,
    }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(doc) => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            let written = serde_json::to_writer_pretty(&mut out, &doc)
                .map_err(|e| Error::Internal(e.to_string()))
                .and_then(|_| writeln!(out).map_err(io_err));
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
