//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::bench::{self, GridSpec};
use crate::config::{RunConfig, SolverChoice};
use crate::error::{Error, Result};
use crate::io::{self, LabeledData};
use crate::opfile;
use crate::pipeline::{secs, Model, OperatorStats};
use crate::report::{self, SolveSummary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SOLVER: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_IO: i32 = 5;

const EXIT_HELP: &str = "\
Exit codes:
  0  success
  1  solver or numerical failure
  2  usage error: unknown flag, bad value, invalid setting
  3  malformed input: CSV, config file or operator file
  4  budget exceeded: dense cap, active-set cap or grid size
  5  file could not be read or written";

#[derive(Debug, Parser)]
#[command(name = "samplet", version, about = "Sparse multiresolution kernel approximation of scattered data", after_help = EXIT_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a kernel model to labeled points and write report.json, run.cfg and coefficients.csv.
    Fit {
        #[command(flatten)]
        common: Common,
        /// Write the compressed operator in SMPK1 layout.
        #[arg(long)]
        export_operator: Option<PathBuf>,
        /// Write the compressed operator as Matrix Market text.
        #[arg(long)]
        export_mtx: Option<PathBuf>,
    },
    /// Evaluate fitted coefficients on a grid or at given points, writing field.csv.
    Eval {
        #[command(flatten)]
        common: Common,
        /// coefficients.csv from a previous fit.
        #[arg(long)]
        coefficients: PathBuf,
        /// Points to evaluate at, one per row; defaults to a grid over the data.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Run a synthetic benchmark and write report.json, metrics.csv and field.csv.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        case: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        noise: Option<f64>,
    },
    /// Apply the samplet transform to the value column of a labeled CSV.
    Transform {
        #[command(flatten)]
        common: Common,
        /// Apply the inverse transform; the value column holds samplet coefficients.
        #[arg(long)]
        inverse: bool,
    },
    /// Print size, dimension and bounding box of a labeled CSV.
    Info {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Config file of key = value lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Labeled CSV `x1,…,xd,value`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory (a file for `transform`).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Kernel family of the first dictionary entry.
    #[arg(long)]
    kernel: Option<String>,
    /// Correlation length of the first dictionary entry.
    #[arg(long)]
    length: Option<f64>,
    /// Samplet order; q + 1 vanishing moments.
    #[arg(long)]
    q: Option<usize>,
    /// Compression threshold.
    #[arg(long)]
    tau: Option<f64>,
    /// Ridge parameter.
    #[arg(long)]
    lambda: Option<f64>,
    /// Constant l1 weight.
    #[arg(long)]
    weight: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    mu0: Option<f64>,
    #[arg(long)]
    outer_steps: Option<usize>,
    /// ridge, fista, mrfista, mrssn (iteratively regularized) or ssn.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for one per core.
    #[arg(long)]
    threads: Option<usize>,
    /// Map the bounding box of the points onto the unit cube.
    #[arg(long)]
    rescale: bool,
    /// Grid points per axis for field output.
    #[arg(long)]
    grid: Option<usize>,
    /// Any config key, as KEY=VALUE; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Setting(format!("--set expects KEY=VALUE, found {kv:?}")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        let mut put = |k: &str, v: Option<String>| v.map_or(Ok(()), |v| cfg.set(k, &v));
        put("input", self.input.as_ref().map(|p| p.display().to_string()))?;
        put("output", self.output.as_ref().map(|p| p.display().to_string()))?;
        put("kernel.0.family", self.kernel.clone())?;
        put("kernel.0.length", self.length.map(|v| v.to_string()))?;
        put("q", self.q.map(|v| v.to_string()))?;
        put("tau", self.tau.map(|v| v.to_string()))?;
        put("lambda", self.lambda.map(|v| v.to_string()))?;
        put("weight", self.weight.map(|v| v.to_string()))?;
        put("tol", self.tol.map(|v| v.to_string()))?;
        put("mu0", self.mu0.map(|v| v.to_string()))?;
        put("outer_steps", self.outer_steps.map(|v| v.to_string()))?;
        put("solver", self.solver.clone())?;
        put("seed", self.seed.map(|v| v.to_string()))?;
        put("threads", self.threads.map(|v| v.to_string()))?;
        put("grid", self.grid.map(|v| v.to_string()))?;
        if self.rescale {
            cfg.rescale = true;
        }
        Ok(cfg)
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code for an error, as listed in `--help`.
pub fn exit_code(e: &Error) -> i32 {
    use samplet_core::Error as Core;
    match e {
        Error::Io { .. } => EXIT_IO,
        Error::RaggedRow { .. }
        | Error::BadCell { .. }
        | Error::Csv(_)
        | Error::NoData
        | Error::OperatorFormat(_)
        | Error::Config { .. } => EXIT_INPUT,
        Error::Setting(_) => EXIT_USAGE,
        Error::Budget { .. } => EXIT_BUDGET,
        Error::Json(_) => EXIT_IO,
        Error::Core(c) => match core_root(c) {
            Core::CapExceeded { .. } | Core::ActiveSetTooLarge { .. } => EXIT_BUDGET,
            Core::InvalidParameter(_) => EXIT_USAGE,
            Core::NonFinite(_) | Core::EmptyPointSet => EXIT_INPUT,
            _ => EXIT_SOLVER,
        },
    }
}

fn core_root(e: &samplet_core::Error) -> &samplet_core::Error {
    match e {
        samplet_core::Error::OuterStep { source, .. } => core_root(source),
        other => other,
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    let common = match &cmd {
        Command::Fit { common, .. }
        | Command::Eval { common, .. }
        | Command::Bench { common, .. }
        | Command::Transform { common, .. }
        | Command::Info { common } => common.clone(),
    };
    let mut cfg = common.resolve()?;
    if let Command::Bench { case, n, noise, .. } = &cmd {
        if let Some(c) = case {
            cfg.case = Some(c.parse()?);
        }
        if let Some(n) = n {
            cfg.n = *n;
        }
        if let Some(x) = noise {
            cfg.noise = *x;
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Setting(format!("thread pool: {e}")))?;
    pool.install(|| match cmd {
        Command::Fit {
            export_operator,
            export_mtx,
            ..
        } => fit(&cfg, export_operator.as_deref(), export_mtx.as_deref()),
        Command::Eval {
            coefficients, points, ..
        } => eval(&cfg, &coefficients, points.as_deref()),
        Command::Bench { .. } => bench_cmd(&cfg),
        Command::Transform { inverse, .. } => transform(&cfg, inverse),
        Command::Info { .. } => info(&cfg),
    })
}

fn require<'a>(p: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    p.as_deref()
        .filter(|p| !p.as_os_str().is_empty())
        .ok_or_else(|| Error::Setting(format!("missing --{what}")))
}

fn load(cfg: &RunConfig) -> Result<LabeledData> {
    let mut data = io::read_labeled_csv(require(&cfg.input, "input")?)?;
    if cfg.rescale {
        data.cloud = data.cloud.rescaled_to_unit_box();
    }
    Ok(data)
}

fn out_dir(cfg: &RunConfig) -> Result<&Path> {
    let dir = require(&cfg.output, "output")?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(dir)
}

fn info(cfg: &RunConfig) -> Result<()> {
    let data = load(cfg)?;
    let b = data.cloud.bbox();
    println!("points {}", data.cloud.len());
    println!("dim {}", data.cloud.dim());
    for k in 0..data.cloud.dim() {
        println!("axis {k} {} {}", io::fmt_f64(b.min[k]), io::fmt_f64(b.max[k]));
    }
    println!("leaf_capacity {} (q = {})", cfg.leaf_capacity_for(data.cloud.dim()), cfg.q);
    Ok(())
}

fn transform(cfg: &RunConfig, inverse: bool) -> Result<()> {
    let data = load(cfg)?;
    let out = require(&cfg.output, "output")?;
    let tree = samplet_core::build_cluster_tree(&data.cloud, cfg.leaf_capacity_for(data.cloud.dim()))?;
    let basis = samplet_core::SampletBasis::new(tree, &data.cloud, cfg.q)?;
    if inverse {
        let v = basis.inverse(&data.values)?;
        io::write_labeled_csv(out, &data.cloud, &v)
    } else {
        io::write_vector(out, &basis.forward(&data.values)?)
    }
}

fn fit(cfg: &RunConfig, export_operator: Option<&Path>, export_mtx: Option<&Path>) -> Result<()> {
    let data = load(cfg)?;
    let dir = out_dir(cfg)?;
    let dim = data.cloud.dim();
    let n = data.cloud.len();
    let mut model = Model::build(data.cloud, cfg)?;
    if let Some(p) = export_operator {
        for (j, op) in model.ops.iter().enumerate() {
            opfile::save_operator(&indexed(p, j, model.ops.len()), op)?;
        }
    }
    if let Some(p) = export_mtx {
        for (j, op) in model.ops.iter().enumerate() {
            let path = indexed(p, j, model.ops.len());
            let mut f = io::create(&path)?;
            opfile::write_matrix_market(&mut f, op).map_err(|e| Error::io(&path, e))?;
        }
    }
    let choice = cfg.resolved_solver();
    let rep = model.solve(&data.values, choice, cfg)?;
    model.timings.solve_s = rep.wall_time.map_or(0.0, secs);
    let fitted = model.fitted(&rep.beta)?;
    let resid: Vec<f64> = data.values.iter().zip(&fitted).map(|(h, f)| h - f).collect();
    let rel = bench::norm2(&resid) / bench::norm2(&data.values).max(f64::MIN_POSITIVE);
    let alpha = rep.alpha.clone().unwrap_or_default();
    io::write_coefficients(&dir.join("coefficients.csv"), &rep.beta, &alpha, model.ops.len())?;
    if let Some(g) = cfg.grid.filter(|&g| g > 0) {
        let t = Instant::now();
        write_field(&model, &alpha, &GridSpec::over(&model.cloud, g), dir)?;
        model.timings.eval_s = secs(t.elapsed());
    }
    let mut m = report::new_report(cfg, "fit")?;
    m.insert("data".into(), json!({ "n": n, "dim": dim }));
    m.insert("solver".into(), json!(choice.name()));
    m.insert("operators".into(), json!(model.ops.iter().map(OperatorStats::of).collect::<Vec<_>>()));
    m.insert("solve".into(), serde_json::to_value(SolveSummary::of(&rep))?);
    m.insert("rel_l2_error".into(), json!(rel));
    m.insert("timings".into(), serde_json::to_value(&model.timings)?);
    report::write_json(&dir.join("report.json"), &Value::Object(m))?;
    write_config(cfg, dir)?;
    println!(
        "{}: {} iterations, |A| = {}, residual {}, relative error {}",
        choice.name(),
        rep.iterations,
        rep.final_active_size,
        rep.residual_inf,
        rel
    );
    Ok(())
}

/// The effective config in file form, for replays and `eval`.
fn write_config(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let path = dir.join("run.cfg");
    std::fs::write(&path, cfg.to_text()).map_err(|e| Error::io(&path, e))
}

fn indexed(p: &Path, j: usize, total: usize) -> PathBuf {
    if total == 1 {
        return p.to_path_buf();
    }
    let mut s = p.as_os_str().to_owned();
    s.push(format!(".{j}"));
    PathBuf::from(s)
}

fn write_field(model: &Model, alpha: &[f64], grid: &GridSpec, dir: &Path) -> Result<()> {
    let n = model.cloud.len();
    let terms: Vec<_> = model
        .specs
        .iter()
        .enumerate()
        .map(|(j, s)| (s, &alpha[j * n..(j + 1) * n]))
        .collect();
    let values = bench::grid_eval(&terms, &model.cloud, grid)?;
    let pts = samplet_core::PointCloud::new(model.cloud.dim(), grid.points())?;
    io::write_labeled_csv(&dir.join("field.csv"), &pts, &values)
}

fn eval(cfg: &RunConfig, coefficients: &Path, points: Option<&Path>) -> Result<()> {
    let data = load(cfg)?;
    let dir = out_dir(cfg)?;
    let specs = cfg.kernel_specs()?;
    let alpha = io::read_alpha(coefficients)?;
    let n = data.cloud.len();
    if alpha.len() != n * specs.len() {
        return Err(samplet_core::Error::LengthMismatch {
            expected: n * specs.len(),
            found: alpha.len(),
        }
        .into());
    }
    let terms: Vec<_> = specs.iter().enumerate().map(|(j, s)| (s, &alpha[j * n..(j + 1) * n])).collect();
    let (pts, values) = match points {
        Some(p) => {
            let rows = io::parse_table(std::fs::File::open(p).map_err(|e| Error::io(p, e))?)?;
            let coords: Vec<f64> = rows.into_iter().flatten().collect();
            let pts = samplet_core::PointCloud::new(data.cloud.dim(), coords)?;
            let v = bench::eval_at(&terms, &data.cloud, pts.coords())?;
            (pts, v)
        }
        None => {
            let grid = GridSpec::over(&data.cloud, cfg.grid.unwrap_or(200));
            let v = bench::grid_eval(&terms, &data.cloud, &grid)?;
            (samplet_core::PointCloud::new(data.cloud.dim(), grid.points())?, v)
        }
    };
    io::write_labeled_csv(&dir.join("field.csv"), &pts, &values)
}

/// Paper defaults for unset benchmark regularization: `λ = 2e−5 N`, `w = 2e−5`.
pub fn bench_defaults(cfg: &RunConfig) -> RunConfig {
    let mut c = cfg.clone();
    c.lambda.get_or_insert(2e-5 * cfg.n as f64);
    c.weight.get_or_insert(2e-5);
    c.solver.get_or_insert(SolverChoice::Mrssn);
    c.grid.get_or_insert(200);
    c
}

fn bench_cmd(cfg: &RunConfig) -> Result<()> {
    let cfg = bench_defaults(cfg);
    let kind = cfg.case.ok_or_else(|| Error::Setting("missing --case".into()))?;
    let dir = out_dir(&cfg)?;
    let out = bench::run_benchmark(&cfg, kind)?;
    let choice = cfg.solver.expect("set by bench_defaults");
    if let Some(g) = cfg.grid.filter(|&g| g > 0) {
        let alpha = out.report.alpha.clone().unwrap_or_default();
        write_field(&out.model, &alpha, &GridSpec::over(&out.model.cloud, g), dir)?;
    }
    let mut m = report::new_report(&cfg, "bench")?;
    m.insert("case".into(), json!(kind.name()));
    m.insert("solver".into(), json!(choice.name()));
    m.insert("truth".into(), serde_json::to_value(&out.data.truth)?);
    m.insert("operators".into(), json!(out.model.ops.iter().map(OperatorStats::of).collect::<Vec<_>>()));
    m.insert("solve".into(), serde_json::to_value(SolveSummary::of(&out.report))?);
    m.insert("metrics".into(), serde_json::to_value(&out.metrics)?);
    m.insert("timings".into(), serde_json::to_value(&out.model.timings)?);
    report::write_json(&dir.join("report.json"), &Value::Object(m))?;
    write_config(&cfg, dir)?;
    let path = dir.join("metrics.csv");
    let mut w = io::create(&path)?;
    bench::write_metrics_row(&mut w, kind, choice, &cfg, &out).map_err(|e| Error::io(&path, e))?;
    println!(
        "{} {}: {} iterations, |A| = {}, error {}",
        kind.name(),
        choice.name(),
        out.metrics.iterations,
        out.metrics.final_active_size,
        out.metrics.rel_l2_error
    );
    Ok(())
}
