//! The `sarl` command line: synth, bounds, solve, sweep, embed, eval.

pub mod artifact;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::data::{
    gen_gaussian_mixture, load_csv, load_csv_with_schema, split, write_csv, Dataset, DatasetSpec,
    SplitSpec, RNG_ALGORITHM,
};
use crate::error::{Result, SarlError};
use crate::eval::{accuracy, delta_star, fit_logistic_with_classes, majority_prior, LogisticHyper, TradeoffPoint};
use crate::kernels::{Bandwidth, KernelModel, KernelSpec};
use crate::numerics::{Matrix, RankTolerance};
use crate::solver::{
    bisect_alpha_with, build_problem_kernel, build_problem_linear, compute_bounds, lambda_grid,
    sweep_solutions, BoundValues, Problem, Solution, SolverConfig, DEFAULT_GRID_POINTS,
    DEFAULT_MAX_ITER, DEFAULT_NEGATIVITY_THRESHOLD,
};

use artifact::{load_encoder, save_encoder};

/// Environment variable that overrides `--out`.
pub const OUT_DIR_ENV: &str = "SARL_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "sarl", version, about = "Spectral adversarial representation learning")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the four-Gaussian mixture as train/test CSV files.
    Synth(SynthArgs),
    /// Attainable target/adversary loss bounds for a training set.
    Bounds(BoundsArgs),
    /// Solve for one lambda, or bisect lambda to hit --alpha-tol.
    Solve(SolveArgs),
    /// Solve over a grid of lambda values.
    Sweep(SweepArgs),
    /// Map a dataset through a stored encoder.
    Embed(EmbedArgs),
    /// Train logistic classifiers on stored embeddings and score them.
    Eval(EvalArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    /// Total samples (multiple of 4) before splitting.
    #[arg(long, default_value_t = 5000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    Linear,
    Poly,
    Rbf,
}

#[derive(Debug, Args, Serialize)]
pub struct ProblemArgs {
    /// Training CSV.
    #[arg(long)]
    pub train: PathBuf,
    /// Column spec (TOML).
    #[arg(long)]
    pub spec: PathBuf,
    /// Force standardization of numeric features on.
    #[arg(long)]
    pub standardize: bool,
    #[arg(long, value_enum, default_value = "linear")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "rbf")]
    pub kernel: KernelFamily,
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
    #[arg(long, default_value_t = 1.0)]
    pub coef0: f64,
    /// RBF bandwidth: a positive number or "median".
    #[arg(long, default_value = "median")]
    pub bandwidth: String,
    /// Relative singular-value cutoff for numerical rank.
    #[arg(long, default_value_t = RankTolerance::DEFAULT_CUTOFF)]
    pub rank_cutoff: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Linear,
    Kernel,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SolverArgs {
    #[arg(long)]
    pub max_rank: Option<usize>,
    #[arg(long)]
    pub include_zero_eigenvectors: bool,
    #[arg(long, default_value_t = DEFAULT_NEGATIVITY_THRESHOLD)]
    pub negativity_threshold: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, conflicts_with = "alpha_tol", required_unless_present = "alpha_tol")]
    pub lambda: Option<f64>,
    /// Target adversary loss; lambda is found by bisection.
    #[arg(long)]
    pub alpha_tol: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Comma-separated lambda values; defaults to evenly spaced --points.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub points: usize,
    /// Add logistic accuracies measured on --test.
    #[arg(long, requires = "test")]
    pub evaluate: bool,
    #[arg(long)]
    pub test: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EmbedArgs {
    /// Encoder sidecar (encoder.json).
    #[arg(long)]
    pub encoder: PathBuf,
    /// CSV to embed; encoded with the encoder's training schema.
    #[arg(long)]
    pub data: PathBuf,
    /// Output file name inside the output directory.
    #[arg(long, default_value = "embedding.csv")]
    pub name: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    /// Embedding CSV used to train the classifiers.
    #[arg(long)]
    pub train: PathBuf,
    /// Embedding CSV used to score them.
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 500)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub l2: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report).unwrap_or_default();
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(inner) = source {
                eprintln!("  caused by: {inner}");
                source = inner.source();
            }
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<Value> {
    match cli.command {
        Command::Synth(a) => cmd_synth(&a),
        Command::Bounds(a) => cmd_bounds(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Embed(a) => cmd_embed(&a),
        Command::Eval(a) => cmd_eval(&a),
    }
}

fn out_dir(flag: &Option<PathBuf>) -> Option<PathBuf> {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => flag.clone(),
    }
}

fn required_out_dir(flag: &Option<PathBuf>) -> Result<PathBuf> {
    let dir = out_dir(flag)
        .ok_or_else(|| SarlError::InvalidConfig(format!("an output directory is required (--out or {OUT_DIR_ENV})")))?;
    fs::create_dir_all(&dir).map_err(|e| SarlError::io(&dir, e))?;
    Ok(dir)
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").map_err(|e| SarlError::io(path, e))
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn cmd_synth(a: &SynthArgs) -> Result<Value> {
    let dir = required_out_dir(&a.out)?;
    let start = Instant::now();
    let data = gen_gaussian_mixture(a.n, a.seed)?;
    let (train, test) = split(
        &data,
        SplitSpec {
            train_fraction: a.train_fraction,
            seed: a.seed,
        },
    )?;
    write_csv(&train, dir.join("train.csv"))?;
    write_csv(&test, dir.join("test.csv"))?;
    let spec = train.schema.written_spec().to_toml_string()?;
    let spec_path = dir.join("spec.toml");
    fs::write(&spec_path, spec).map_err(|e| SarlError::io(&spec_path, e))?;
    let report = json!({
        "command": "synth",
        "config": a,
        "rng": RNG_ALGORITHM,
        "files": {"train": "train.csv", "test": "test.csv", "spec": "spec.toml"},
        "n_train": train.n_samples(),
        "n_test": test.n_samples(),
        "timings_ms": {"total": elapsed_ms(start)},
    });
    write_json(&dir.join("synth.json"), &report)?;
    Ok(report)
}

fn kernel_spec(a: &ProblemArgs) -> Result<KernelSpec> {
    let spec = match a.kernel {
        KernelFamily::Linear => KernelSpec::Linear,
        KernelFamily::Poly => KernelSpec::Polynomial {
            degree: a.degree,
            coef0: a.coef0,
        },
        KernelFamily::Rbf => {
            let bandwidth = if a.bandwidth.eq_ignore_ascii_case("median") {
                Bandwidth::Median
            } else {
                Bandwidth::Fixed(a.bandwidth.parse().map_err(|_| {
                    SarlError::InvalidConfig(format!("bandwidth must be a number or 'median', got {:?}", a.bandwidth))
                })?)
            };
            KernelSpec::Rbf { bandwidth }
        }
    };
    spec.validate()?;
    Ok(spec)
}

fn load_training(a: &ProblemArgs) -> Result<Dataset> {
    let mut spec = DatasetSpec::from_path(&a.spec)?;
    spec.standardize |= a.standardize;
    load_csv(&a.train, &spec)
}

fn build_problem(a: &ProblemArgs, data: &Dataset) -> Result<(Problem, Value)> {
    let tol = RankTolerance::new(a.rank_cutoff)?;
    match a.mode {
        ModeArg::Linear => Ok((
            build_problem_linear(data.x.as_ref(), data.y.as_ref(), data.s.as_ref(), tol)?,
            Value::Null,
        )),
        ModeArg::Kernel => {
            let model = KernelModel::fit(&kernel_spec(a)?, data.x.as_ref())?;
            let info = json!({"spec": model.spec(), "resolved_bandwidth": model.resolved_bandwidth()});
            Ok((build_problem_kernel(model, data.y.as_ref(), data.s.as_ref(), tol)?, info))
        }
    }
}

fn solver_config(a: &SolverArgs, lambda: f64) -> Result<SolverConfig> {
    let config = SolverConfig {
        lambda,
        max_rank: a.max_rank,
        negativity_threshold: a.negativity_threshold,
        include_zero_eigenvectors: a.include_zero_eigenvectors,
    };
    config.validate()?;
    Ok(config)
}

/// Every reported adversary loss must lie within the bounds.
fn check_points(points: &[TradeoffPoint], bounds: &BoundValues) -> Result<()> {
    for p in points {
        if p.adversary_loss < bounds.alpha_min - 1e-9 || p.adversary_loss > bounds.alpha_max + 1e-9 {
            return Err(SarlError::Invariant(format!(
                "J_s = {} at lambda {} outside [{}, {}]",
                p.adversary_loss, p.lambda, bounds.alpha_min, bounds.alpha_max
            )));
        }
    }
    Ok(())
}

pub fn cmd_bounds(a: &BoundsArgs) -> Result<Value> {
    let start = Instant::now();
    let data = load_training(&a.problem)?;
    let (problem, kernel) = build_problem(&a.problem, &data)?;
    let bounds = compute_bounds(&problem, problem.rank_tolerance())?;
    let report = json!({
        "command": "bounds",
        "config": a,
        "mode": problem.mode(),
        "kernel": kernel,
        "n_samples": problem.n_samples(),
        "rank": problem.rank(),
        "bounds": bounds.values(),
        "timings_ms": {"total": elapsed_ms(start)},
    });
    if let Some(dir) = out_dir(&a.problem.out) {
        fs::create_dir_all(&dir).map_err(|e| SarlError::io(&dir, e))?;
        write_json(&dir.join("bounds.json"), &report)?;
    }
    Ok(report)
}

pub fn cmd_solve(a: &SolveArgs) -> Result<Value> {
    let start = Instant::now();
    let base = solver_config(&a.solver, a.lambda.unwrap_or(0.5))?;
    let data = load_training(&a.problem)?;
    let (problem, kernel) = build_problem(&a.problem, &data)?;
    let setup_ms = elapsed_ms(start);
    let bounds = compute_bounds(&problem, problem.rank_tolerance())?;
    let (solution, bisection) = match a.alpha_tol {
        Some(alpha_tol) => {
            let outcome = bisect_alpha_with(&problem, alpha_tol, a.epsilon, a.max_iter, &base)?;
            let info = json!({
                "alpha_tol": alpha_tol,
                "epsilon": a.epsilon,
                "iterations": outcome.iterations,
                "trace": outcome.trace,
            });
            (outcome.solution, info)
        }
        None => (crate::solver::solve(&problem, &base)?, Value::Null),
    };
    let point = TradeoffPoint::from_solution(&solution);
    check_points(&[point], &bounds.values())?;

    let mut report = json!({
        "command": "solve",
        "config": a,
        "mode": problem.mode(),
        "kernel": kernel,
        "n_samples": problem.n_samples(),
        "rank": problem.rank(),
        "bounds": bounds.values(),
        "lambda": solution.lambda,
        "r": solution.encoder.dim(),
        "target_loss": solution.objectives.target_loss,
        "adversary_loss": solution.objectives.adversary_loss,
        "eigenvalues": solution.encoder.eigenvalues_used(),
        "negative_count": solution.negative_count,
        "bisection": bisection,
        "encoder_artifact": Value::Null,
    });
    if let Some(dir) = out_dir(&a.problem.out) {
        let path = save_encoder(&solution.encoder, solution.lambda, &data.schema, &a.problem.train, &dir)?;
        report["encoder_artifact"] = json!(path);
        report["timings_ms"] = json!({"setup": setup_ms, "total": elapsed_ms(start)});
        write_json(&dir.join("report.json"), &report)?;
    } else {
        report["timings_ms"] = json!({"setup": setup_ms, "total": elapsed_ms(start)});
    }
    Ok(report)
}

fn evaluate(solutions: &[Solution], train: &Dataset, test: &Dataset) -> Result<Vec<TradeoffPoint>> {
    let labels = |d: &Dataset| -> Result<(Vec<usize>, Vec<usize>)> {
        let y = d
            .target_labels()
            .ok_or_else(|| SarlError::Schema("evaluation needs a categorical target column".into()))?;
        let s = d
            .sensitive_labels()
            .ok_or_else(|| SarlError::Schema("evaluation needs a categorical sensitive column".into()))?;
        Ok((y, s))
    };
    let (y_tr, s_tr) = labels(train)?;
    let (y_te, s_te) = labels(test)?;
    let classes_y = train.schema.target.iter().find_map(|c| c.levels.as_ref()).map_or(2, Vec::len);
    let classes_s = train.schema.sensitive.iter().find_map(|c| c.levels.as_ref()).map_or(2, Vec::len);
    let hyper = LogisticHyper::default();
    solutions
        .iter()
        .map(|sol| {
            let z_tr = sol.encoder.embed_batch(train.x.as_ref())?;
            let z_te = sol.encoder.embed_batch(test.x.as_ref())?;
            let clf_y = fit_logistic_with_classes(z_tr.as_ref(), &y_tr, classes_y, &hyper)?;
            let clf_s = fit_logistic_with_classes(z_tr.as_ref(), &s_tr, classes_s, &hyper)?;
            let mut p = TradeoffPoint::from_solution(sol);
            p.target_accuracy = Some(accuracy(&clf_y, z_te.as_ref(), &y_te)?);
            p.adversary_accuracy = Some(accuracy(&clf_s, z_te.as_ref(), &s_te)?);
            Ok(p)
        })
        .collect()
}

fn write_tradeoff_csv(points: &[TradeoffPoint], path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| SarlError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["lambda", "r", "target_loss", "adversary_loss", "target_accuracy", "adversary_accuracy"])?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for p in points {
        w.write_record([
            p.lambda.to_string(),
            p.r.to_string(),
            p.target_loss.to_string(),
            p.adversary_loss.to_string(),
            opt(p.target_accuracy),
            opt(p.adversary_accuracy),
        ])?;
    }
    w.flush().map_err(|e| SarlError::io(path, e))?;
    Ok(())
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<Value> {
    let start = Instant::now();
    let grid = match &a.grid {
        Some(g) => g.clone(),
        None => lambda_grid(a.points),
    };
    if grid.is_empty() {
        return Err(SarlError::InvalidConfig("empty lambda grid".into()));
    }
    for &l in &grid {
        solver_config(&a.solver, l)?;
    }
    let base = solver_config(&a.solver, grid[0])?;
    let data = load_training(&a.problem)?;
    let (problem, kernel) = build_problem(&a.problem, &data)?;
    let bounds = compute_bounds(&problem, problem.rank_tolerance())?;
    let solutions = sweep_solutions(&problem, &grid, &base)?;
    let points = if a.evaluate {
        let test_path = a.test.as_ref().expect("clap enforces --test with --evaluate");
        let test = load_csv_with_schema(test_path, &data.schema)?;
        evaluate(&solutions, &data, &test)?
    } else {
        solutions.iter().map(TradeoffPoint::from_solution).collect()
    };
    check_points(&points, &bounds.values())?;
    let mut report = json!({
        "command": "sweep",
        "config": a,
        "mode": problem.mode(),
        "kernel": kernel,
        "n_samples": problem.n_samples(),
        "rank": problem.rank(),
        "bounds": bounds.values(),
        "rng": RNG_ALGORITHM,
        "points": points,
        "tradeoff_csv": Value::Null,
    });
    if let Some(dir) = out_dir(&a.problem.out) {
        fs::create_dir_all(&dir).map_err(|e| SarlError::io(&dir, e))?;
        write_tradeoff_csv(&points, &dir.join("tradeoff.csv"))?;
        report["tradeoff_csv"] = json!("tradeoff.csv");
        report["timings_ms"] = json!({"total": elapsed_ms(start)});
        write_json(&dir.join("report.json"), &report)?;
    } else {
        report["timings_ms"] = json!({"total": elapsed_ms(start)});
    }
    Ok(report)
}

/// Embedding CSV layout: `z0..z{r-1}` then one column per target and
/// sensitive attribute carrying the original labels.
pub fn cmd_embed(a: &EmbedArgs) -> Result<Value> {
    let dir = required_out_dir(&a.out)?;
    let start = Instant::now();
    let (encoder, sidecar) = load_encoder(&a.encoder)?;
    let data = load_csv_with_schema(&a.data, &sidecar.schema)?;
    if data.x.nrows() != encoder.input_dim() {
        return Err(SarlError::shape(format!(
            "encoder expects {} input rows, dataset has {}",
            encoder.input_dim(),
            data.x.nrows()
        )));
    }
    let z = encoder.embed_batch(data.x.as_ref())?;
    let path = dir.join(&a.name);
    write_embedding(&z, &data, &path)?;
    let report = json!({
        "command": "embed",
        "config": a,
        "mode": sidecar.mode,
        "r": encoder.dim(),
        "lambda": sidecar.lambda,
        "n_samples": data.n_samples(),
        "embedding": path,
        "timings_ms": {"total": elapsed_ms(start)},
    });
    Ok(report)
}

fn write_embedding(z: &Matrix, data: &Dataset, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| SarlError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let mut header: Vec<String> = (0..z.nrows()).map(|k| format!("z{k}")).collect();
    header.push("target".into());
    header.push("sensitive".into());
    w.write_record(&header)?;
    let level = |labels: Option<Vec<usize>>, attrs: &[crate::data::AttributeColumn]| -> Result<Vec<String>> {
        let names = attrs
            .iter()
            .find_map(|c| c.levels.clone())
            .ok_or_else(|| SarlError::Schema("embedding needs categorical target and sensitive columns".into()))?;
        Ok(labels.unwrap_or_default().into_iter().map(|l| names[l].clone()).collect())
    };
    let ys = level(data.target_labels(), &data.schema.target)?;
    let ss = level(data.sensitive_labels(), &data.schema.sensitive)?;
    for j in 0..z.ncols() {
        let mut rec: Vec<String> = (0..z.nrows()).map(|k| z[(k, j)].to_string()).collect();
        rec.push(ys[j].clone());
        rec.push(ss[j].clone());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| SarlError::io(path, e))?;
    Ok(())
}

struct EmbeddingTable {
    z: Matrix,
    target: Vec<String>,
    sensitive: Vec<String>,
}

fn read_embedding(path: &Path) -> Result<EmbeddingTable> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => SarlError::io(path, io),
        other => SarlError::Schema(format!("{}: {other:?}", path.display())),
    })?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.len() < 2 || header[header.len() - 2] != "target" || header[header.len() - 1] != "sensitive" {
        return Err(SarlError::Schema(format!(
            "{}: expected embedding columns z0.., target, sensitive",
            path.display()
        )));
    }
    let r = header.len() - 2;
    let mut values = Vec::new();
    let (mut target, mut sensitive) = (Vec::new(), Vec::new());
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        for k in 0..r {
            let cell = rec.get(k).unwrap_or("");
            values.push(cell.parse::<f64>().map_err(|_| SarlError::Parse {
                row: i + 1,
                column: header[k].clone(),
                value: cell.to_string(),
            })?);
        }
        target.push(rec.get(r).unwrap_or("").to_string());
        sensitive.push(rec.get(r + 1).unwrap_or("").to_string());
    }
    let n = target.len();
    if n == 0 {
        return Err(SarlError::EmptyInput(format!("{} has no rows", path.display())));
    }
    let z = Matrix::from_fn(r, n, |k, j| values[j * r + k]);
    Ok(EmbeddingTable { z, target, sensitive })
}

fn index_labels(train: &[String], test: &[String]) -> (Vec<usize>, Vec<usize>, Vec<String>) {
    let mut levels: Vec<String> = train.iter().chain(test).cloned().collect();
    levels.sort();
    levels.dedup();
    let idx = |v: &[String]| v.iter().map(|s| levels.binary_search(s).unwrap()).collect();
    (idx(train), idx(test), levels)
}

pub fn cmd_eval(a: &EvalArgs) -> Result<Value> {
    let start = Instant::now();
    let hyper = LogisticHyper {
        learning_rate: a.learning_rate,
        epochs: a.epochs,
        l2: a.l2,
    };
    hyper.validate()?;
    let train = read_embedding(&a.train)?;
    let test = read_embedding(&a.test)?;
    if train.z.nrows() != test.z.nrows() {
        return Err(SarlError::shape(format!(
            "train embedding has {} dimensions, test has {}",
            train.z.nrows(),
            test.z.nrows()
        )));
    }
    let mut heads = serde_json::Map::new();
    for (name, tr, te) in [
        ("target", &train.target, &test.target),
        ("sensitive", &train.sensitive, &test.sensitive),
    ] {
        let (ltr, lte, levels) = index_labels(tr, te);
        let clf = fit_logistic_with_classes(train.z.as_ref(), &ltr, levels.len().max(2), &hyper)?;
        let acc = accuracy(&clf, test.z.as_ref(), &lte)?;
        let prior = majority_prior(&lte)?;
        heads.insert(
            name.into(),
            json!({
                "accuracy": acc,
                "majority_prior": prior,
                "delta_star": delta_star(acc, prior),
                "levels": levels,
                "diverged": clf.diverged,
                "degenerate": clf.degenerate,
                "final_loss": clf.final_loss(),
            }),
        );
    }
    let report = json!({
        "command": "eval",
        "config": a,
        "r": train.z.nrows(),
        "n_train": train.z.ncols(),
        "n_test": test.z.ncols(),
        "heads": heads,
        "timings_ms": {"total": elapsed_ms(start)},
    });
    if let Some(dir) = out_dir(&a.out) {
        fs::create_dir_all(&dir).map_err(|e| SarlError::io(&dir, e))?;
        write_json(&dir.join("eval.json"), &report)?;
    }
    Ok(report)
}
