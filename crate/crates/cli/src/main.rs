use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};

use cae_youden::bench::{emit_table, run_plan, BenchPlan, TableFormat};
use cae_youden::cae::{cv_select_lambda, dca_fit_with, CaeModel, FitConfig, KernelChoice};
use cae_youden::dataset::{load_csv, load_profiles, pima_filter, CsvSchema, LabelEncoding};
use cae_youden::kernels::KernelSpec;
use cae_youden::pooled::{pooled_fit, roc_points};
use cae_youden::simulate::{generate, Example, SimSpec};
use cae_youden::youden::{youden_curve, SmootherConfig};
use cae_youden::{log_grid, Error, Exec, BANDWIDTH_GRID_LEN, LAMBDA_GRID_LEN};

mod config;

use config::{ConfigFile, InitName, KernelName, MethodName, TuningName};

#[derive(Parser)]
#[command(name = "cae-youden", version, about = "Covariate-adjusted Youden index and cut-point estimation")]
struct Cli {
    /// JSON file with defaults for any option; flags take precedence
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the cut-point function and write a model file
    Fit(FitCmd),
    /// Evaluate a fitted cut-point function at covariate profiles
    Predict(PredictCmd),
    /// Cut-point and smoothed Youden index along a covariate grid
    YoudenCurve(CurveCmd),
    /// Covariate-free cut-point by exhaustive threshold search
    Pooled(PooledCmd),
    /// Draw a simulated dataset
    Simulate(SimulateCmd),
    /// Monte-Carlo comparison against the simulation truth
    Bench(BenchCmd),
    /// Age-adjusted analysis of the Pima diabetes data
    Pima(PimaCmd),
}

#[derive(Args)]
struct SchemaArgs {
    /// Marker column
    #[arg(long)]
    marker: Option<String>,
    /// Class label column
    #[arg(long)]
    label: Option<String>,
    /// Covariate columns, comma separated
    #[arg(long, value_delimiter = ',')]
    covariates: Option<Vec<String>>,
    /// Label value of the diseased class [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    positive: Option<f64>,
    /// Label value of the non-diseased class [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    negative: Option<f64>,
}

#[derive(Args)]
struct SolverArgs {
    /// Margin width of the surrogate loss, in marker units [default: 0.1]
    #[arg(long)]
    delta: Option<f64>,
    /// Kernel on standardized covariates [default: auto]
    #[arg(long, value_enum)]
    kernel: Option<KernelName>,
    /// Gaussian bandwidth, with `--kernel gaussian`
    #[arg(long)]
    sigma: Option<f64>,
    /// Starting point of the DC iterations [default: hinge]
    #[arg(long, value_enum)]
    init: Option<InitName>,
    #[arg(long)]
    dca_max_iter: Option<usize>,
    #[arg(long)]
    dca_rel_tol: Option<f64>,
    #[arg(long)]
    inner_max_iter: Option<usize>,
    #[arg(long)]
    inner_rel_tol: Option<f64>,
    /// Seed for fold assignment [default: 0]
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct LambdaArgs {
    /// Fixed regularization parameter
    #[arg(long, conflicts_with = "cv")]
    lambda: Option<f64>,
    /// Select lambda by K-fold cross-validation
    #[arg(long, value_name = "K")]
    cv: Option<usize>,
    /// Number of points taken evenly from the lambda grid 10^((s-31)/10), s = 1..61 [default: 61]
    #[arg(long)]
    lambda_points: Option<usize>,
}

#[derive(Args)]
struct SmoothArgs {
    /// Bandwidth for both classes, in covariate units
    #[arg(long)]
    h: Option<f64>,
    /// Bandwidth for the diseased class
    #[arg(long)]
    h_pos: Option<f64>,
    /// Bandwidth for the non-diseased class
    #[arg(long)]
    h_neg: Option<f64>,
}

#[derive(Args)]
struct FitCmd {
    /// Training CSV
    data: PathBuf,
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    lambda: LambdaArgs,
    /// Model file to write (JSON)
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct PredictCmd {
    /// Model file written by `fit`
    #[arg(long)]
    model: PathBuf,
    /// CSV with the covariate columns
    data: PathBuf,
    /// Covariate columns, in model order, comma separated
    #[arg(long, value_delimiter = ',')]
    covariates: Option<Vec<String>>,
    /// Output CSV [default: standard output]
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurveCmd {
    /// Model file written by `fit`
    #[arg(long)]
    model: PathBuf,
    /// Training CSV the model was fitted on
    data: PathBuf,
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    smooth: SmoothArgs,
    /// Evenly spaced grid START:END:STEP over the single covariate
    #[arg(long, conflicts_with = "query")]
    grid: Option<String>,
    /// CSV of query profiles with the covariate columns
    #[arg(long)]
    query: Option<PathBuf>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PooledCmd {
    data: PathBuf,
    #[command(flatten)]
    schema: SchemaArgs,
    /// Also write the ROC points to this CSV
    #[arg(long)]
    roc: Option<PathBuf>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateCmd {
    /// Design 1-4
    #[arg(long)]
    example: Option<u8>,
    /// Sample size
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchCmd {
    /// Design 1-4
    #[arg(long)]
    example: Option<u8>,
    /// Sample sizes, comma separated [default: 100,250,500]
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Replications per sample size [default: 50]
    #[arg(long)]
    reps: Option<usize>,
    /// Methods, comma separated [default: cae,nrm]
    #[arg(long, value_delimiter = ',', value_enum)]
    methods: Option<Vec<MethodName>>,
    /// Base seed; replication r uses seed + r [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Oracle tuning rule [default: per-replication]
    #[arg(long, value_enum)]
    tuning: Option<TuningName>,
    /// Number of points taken evenly from the 61-point lambda grid [default: 61]
    #[arg(long)]
    lambda_points: Option<usize>,
    /// Number of points taken evenly from the 41-point bandwidth grid [default: 41]
    #[arg(long)]
    h_points: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_enum)]
    init: Option<InitName>,
    /// Run replications one at a time
    #[arg(long)]
    sequential: bool,
    /// Table file; markdown for `.md`, CSV otherwise
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PimaCmd {
    /// Pima CSV with the UCI columns
    #[arg(long, default_value = "data/pima-indians-diabetes.csv")]
    data: PathBuf,
    /// Age grid START:END:STEP
    #[arg(long, default_value = "22:59:1")]
    ages: String,
    /// Smoothing bandwidth for both classes, in years [default: 10]
    #[arg(long)]
    h: Option<f64>,
    /// Cross-validation folds [default: 5]
    #[arg(long)]
    cv: Option<usize>,
    #[arg(long)]
    lambda_points: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

/// Usage problems (exit 2) or library errors (exit 2 or 3 by kind).
enum Failure {
    Usage(&'static str, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Csv { .. }
        | Error::Parse { .. }
        | Error::Io(_)
        | Error::Json(_)
        | Error::InvalidInput(_)
        | Error::DimensionMismatch { .. }
        | Error::EmptyClass { .. }
        | Error::EmptyDataset => 2,
        _ => 3,
    }
}

fn first<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn schema(sub: &'static str, a: &SchemaArgs, cfg: &ConfigFile) -> CliResult<CsvSchema> {
    let marker = a
        .marker
        .clone()
        .or(cfg.marker.clone())
        .ok_or(Failure::Usage(sub, "the marker column is required (--marker)".into()))?;
    let label = a
        .label
        .clone()
        .or(cfg.label.clone())
        .ok_or(Failure::Usage(sub, "the label column is required (--label)".into()))?;
    let defaults = LabelEncoding::default();
    Ok(CsvSchema {
        marker,
        label,
        covariates: first(a.covariates.clone(), cfg.covariates.clone(), vec![]),
        encoding: LabelEncoding {
            positive: first(a.positive, cfg.positive, defaults.positive),
            negative: first(a.negative, cfg.negative, defaults.negative),
        },
    })
}

fn fit_config(a: &SolverArgs, cfg: &ConfigFile) -> CliResult<FitConfig> {
    let d = FitConfig::default();
    let kernel = match first(a.kernel, cfg.kernel, KernelName::Auto) {
        KernelName::Auto => KernelChoice::Auto,
        KernelName::Linear => KernelChoice::Fixed(KernelSpec::Linear),
        KernelName::Gaussian => {
            let sigma = a.sigma.or(cfg.sigma).ok_or(Failure::Usage(
                "fit",
                "--kernel gaussian needs --sigma".into(),
            ))?;
            KernelChoice::Fixed(KernelSpec::gaussian(sigma)?)
        }
    };
    let fc = FitConfig {
        delta: first(a.delta, cfg.delta, d.delta),
        lambda: d.lambda,
        kernel,
        init: a.init.or(cfg.init).map(Into::into).unwrap_or(d.init),
        dca_max_iter: first(a.dca_max_iter, cfg.dca_max_iter, d.dca_max_iter),
        dca_rel_tol: first(a.dca_rel_tol, cfg.dca_rel_tol, d.dca_rel_tol),
        inner_max_iter: first(a.inner_max_iter, cfg.inner_max_iter, d.inner_max_iter),
        inner_rel_tol: first(a.inner_rel_tol, cfg.inner_rel_tol, d.inner_rel_tol),
        seed: first(a.seed, cfg.seed, d.seed),
    };
    fc.validate()?;
    Ok(fc)
}

fn smoother(sub: &'static str, a: &SmoothArgs, cfg: &ConfigFile, default: Option<f64>) -> CliResult<SmootherConfig> {
    let h = a.h.or(cfg.h).or(default);
    let h_pos = a.h_pos.or(cfg.h_pos).or(h);
    let h_neg = a.h_neg.or(cfg.h_neg).or(h);
    match (h_pos, h_neg) {
        (Some(h_pos), Some(h_neg)) => {
            let s = SmootherConfig { h_pos, h_neg };
            s.validate()?;
            Ok(s)
        }
        _ => Err(Failure::Usage(sub, "a bandwidth is required (--h, or --h-pos and --h-neg)".into())),
    }
}

/// `START:END:STEP`, inclusive of END up to rounding.
fn parse_grid(sub: &'static str, spec: &str) -> CliResult<Vec<f64>> {
    let bad = || Failure::Usage(sub, format!("grid `{spec}` is not START:END:STEP"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<CliResult<_>>()?;
    let [start, end, step] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0 && start.is_finite() && end.is_finite() && end >= start) {
        return Err(bad());
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

fn output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// `points` entries of the full log grid, evenly spaced by index and keeping both ends.
fn thinned_grid(full_len: usize, points: usize) -> Vec<f64> {
    let full = log_grid(full_len);
    if points >= full_len {
        return full;
    }
    if points <= 1 {
        return vec![full[full_len / 2]];
    }
    (0..points)
        .map(|k| full[(k * (full_len - 1) + (points - 1) / 2) / (points - 1)])
        .collect()
}

fn cmd_fit(c: &FitCmd, cfg: &ConfigFile) -> CliResult<()> {
    let schema = schema("fit", &c.schema, cfg)?;
    let mut fc = fit_config(&c.solver, cfg)?;
    let lambda = c.lambda.lambda.or(if c.lambda.cv.is_some() { None } else { cfg.lambda });
    let folds = c.lambda.cv.or(if c.lambda.lambda.is_some() { None } else { cfg.cv });
    let d = load_csv(&c.data, &schema)?;
    match (lambda, folds) {
        (Some(l), _) => fc.lambda = l,
        (None, Some(k)) => {
            let points = first(c.lambda.lambda_points, cfg.lambda_points, LAMBDA_GRID_LEN);
            let cv = cv_select_lambda(&d, &fc, &thinned_grid(LAMBDA_GRID_LEN, points), k, Exec::default())?;
            println!(
                "cv: lambda = {} (mean validation objective {:.4}, {} folds used, {} skipped)",
                cv.lambda,
                cv.scores.iter().find(|s| s.0 == cv.lambda).map_or(f64::NAN, |s| s.1),
                cv.folds_used,
                cv.folds_skipped
            );
            fc.lambda = cv.lambda;
        }
        (None, None) => return Err(Failure::Usage("fit", "give --lambda or --cv".into())),
    }
    let model = dca_fit_with(&d, &fc, Exec::default())?;
    model.save(&c.out)?;
    println!("lambda = {}", model.lambda());
    println!("final objective = {:.6}", model.final_objective());
    println!("DCA iterations = {}", model.dca_iterations);
    Ok(())
}

fn write_profiles_header(out: &mut dyn Write, names: &[String], extra: &[&str]) -> io::Result<()> {
    let cols: Vec<&str> = names.iter().map(String::as_str).chain(extra.iter().copied()).collect();
    writeln!(out, "{}", cols.join(","))
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn cmd_predict(c: &PredictCmd, cfg: &ConfigFile) -> CliResult<()> {
    let model = CaeModel::load(&c.model)?;
    let names = first(c.covariates.clone(), cfg.covariates.clone(), vec![]);
    if names.len() != model.dim() {
        return Err(Failure::Usage(
            "predict",
            format!("the model has {} covariates but {} were named (--covariates)", model.dim(), names.len()),
        ));
    }
    let zs = load_profiles(&c.data, &names)?;
    let preds = model.predict_all(&zs)?;
    let mut out = output(&c.out)?;
    write_profiles_header(&mut out, &names, &["c_hat"])?;
    for (z, p) in zs.iter().zip(preds) {
        writeln!(out, "{}", join(z.iter().copied().chain([p])))?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_curve(c: &CurveCmd, cfg: &ConfigFile) -> CliResult<()> {
    let schema = schema("youden-curve", &c.schema, cfg)?;
    let sm = smoother("youden-curve", &c.smooth, cfg, None)?;
    let model = CaeModel::load(&c.model)?;
    let d = load_csv(&c.data, &schema)?;
    let queries: Vec<Vec<f64>> = match (&c.grid, &c.query) {
        (Some(g), _) => {
            if d.dim() != 1 {
                return Err(Failure::Usage("youden-curve", "--grid needs exactly one covariate; use --query".into()));
            }
            parse_grid("youden-curve", g)?.into_iter().map(|v| vec![v]).collect()
        }
        (None, Some(q)) => load_profiles(q, &schema.covariates)?,
        (None, None) => d.profiles(),
    };
    let curve = youden_curve(&d, &model, &queries, &sm)?;
    let mut out = output(&c.out)?;
    write_profiles_header(&mut out, &schema.covariates, &["c_hat", "j_hat"])?;
    for p in curve {
        writeln!(out, "{}", join(p.z.iter().copied().chain([p.c_hat, p.j_hat])))?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_pooled(c: &PooledCmd, cfg: &ConfigFile) -> CliResult<()> {
    let schema = schema("pooled", &c.schema, cfg)?;
    let d = load_csv(&c.data, &schema)?;
    let e = pooled_fit(&d)?;
    let mut out = output(&c.out)?;
    writeln!(out, "cut,youden,objective")?;
    writeln!(out, "{},{},{}", e.cut, e.youden, e.objective)?;
    out.flush()?;
    if let Some(path) = &c.roc {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "threshold,fpr,tpr")?;
        for p in roc_points(&d)? {
            writeln!(w, "{},{},{}", p.threshold, p.fpr, p.tpr)?;
        }
        w.flush()?;
    }
    Ok(())
}

fn example(sub: &'static str, flag: Option<u8>, cfg: &ConfigFile) -> CliResult<Example> {
    let id = flag
        .or(cfg.example)
        .ok_or(Failure::Usage(sub, "the design is required (--example 1-4)".into()))?;
    Ok(Example::from_id(id)?)
}

fn cmd_simulate(c: &SimulateCmd, cfg: &ConfigFile) -> CliResult<()> {
    let example = example("simulate", c.example, cfg)?;
    let n = c
        .n
        .or(cfg.n.as_ref().and_then(|v| v.first().copied()))
        .ok_or(Failure::Usage("simulate", "the sample size is required (--n)".into()))?;
    let d = generate(&SimSpec {
        example,
        n,
        seed: first(c.seed, cfg.seed, 0),
    })?;
    let out = output(&c.out)?;
    d.write_csv(out)?;
    Ok(())
}

fn cmd_bench(c: &BenchCmd, cfg: &ConfigFile) -> CliResult<()> {
    let mut plan = BenchPlan::new(example("bench", c.example, cfg)?);
    plan.n_list = first(c.n.clone(), cfg.n.clone(), plan.n_list);
    plan.replications = first(c.reps, cfg.reps, plan.replications);
    if let Some(m) = c.methods.clone().or(cfg.methods.clone()) {
        plan.methods = m.into_iter().map(Into::into).collect();
    }
    plan.base_seed = first(c.seed, cfg.seed, plan.base_seed);
    plan.tuning = c.tuning.or(cfg.tuning).map(Into::into).unwrap_or(plan.tuning);
    plan.lambda_grid = thinned_grid(LAMBDA_GRID_LEN, first(c.lambda_points, cfg.lambda_points, LAMBDA_GRID_LEN));
    plan.h_grid = thinned_grid(BANDWIDTH_GRID_LEN, first(c.h_points, cfg.h_points, BANDWIDTH_GRID_LEN));
    plan.fit.delta = first(c.delta, cfg.delta, plan.fit.delta);
    plan.fit.init = c.init.or(cfg.init).map(Into::into).unwrap_or(plan.fit.init);
    if c.sequential || cfg.sequential == Some(true) {
        plan.exec = Exec::Sequential;
    }
    let result = run_plan(&plan)?;
    print!("{}", emit_table(&result, TableFormat::Markdown));
    for cell in &result.cells {
        if cell.failures > 0 {
            eprintln!("{} n={}: {} failed replications excluded", cell.method.name(), cell.n, cell.failures);
        }
    }
    if let Some(path) = &c.out {
        let format = if path.extension().is_some_and(|e| e == "md") {
            TableFormat::Markdown
        } else {
            TableFormat::Csv
        };
        std::fs::write(path, emit_table(&result, format))?;
    }
    Ok(())
}

fn cmd_pima(c: &PimaCmd, cfg: &ConfigFile) -> CliResult<()> {
    let ages = parse_grid("pima", &c.ages)?;
    let sm = smoother(
        "pima",
        &SmoothArgs {
            h: c.h,
            h_pos: None,
            h_neg: None,
        },
        cfg,
        Some(10.0),
    )?;
    let raw = load_csv(&c.data, &CsvSchema::pima())?;
    let d = pima_filter(&raw)?;
    let fc = FitConfig {
        delta: first(c.delta, cfg.delta, 0.1),
        seed: first(c.seed, cfg.seed, 0),
        ..FitConfig::default()
    };
    let folds = first(c.cv, cfg.cv, 5);
    let grid = thinned_grid(LAMBDA_GRID_LEN, first(c.lambda_points, cfg.lambda_points, LAMBDA_GRID_LEN));
    let cv = cv_select_lambda(&d, &fc, &grid, folds, Exec::default())?;
    let model = dca_fit_with(&d, &FitConfig { lambda: cv.lambda, ..fc }, Exec::default())?;
    eprintln!(
        "pima: {} subjects ({} cases), cv lambda = {}, final objective = {:.4}",
        d.len(),
        d.n_pos(),
        cv.lambda,
        model.final_objective()
    );
    let queries: Vec<Vec<f64>> = ages.iter().map(|a| vec![*a]).collect();
    let curve = youden_curve(&d, &model, &queries, &sm)?;
    let mut out = output(&c.out)?;
    writeln!(out, "age,c_hat,j_hat")?;
    for p in curve {
        writeln!(out, "{},{},{}", p.z[0], p.c_hat, p.j_hat)?;
    }
    out.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    match &cli.command {
        Command::Fit(c) => cmd_fit(c, &cfg),
        Command::Predict(c) => cmd_predict(c, &cfg),
        Command::YoudenCurve(c) => cmd_curve(c, &cfg),
        Command::Pooled(c) => cmd_pooled(c, &cfg),
        Command::Simulate(c) => cmd_simulate(c, &cfg),
        Command::Bench(c) => cmd_bench(c, &cfg),
        Command::Pima(c) => cmd_pima(c, &cfg),
    }
}

fn usage_of(sub: &str) -> String {
    let mut cmd = Cli::command();
    match cmd.find_subcommand_mut(sub) {
        Some(s) => s.render_usage().to_string(),
        None => cmd.render_usage().to_string(),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(sub, msg)) => {
            eprintln!("error: {msg}\n\n{}\n\nFor more information, try '--help'.", usage_of(sub));
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thinning_keeps_the_ends() {
        let full = log_grid(LAMBDA_GRID_LEN);
        let g = thinned_grid(LAMBDA_GRID_LEN, 11);
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], full[0]);
        assert_eq!(g[10], full[60]);
        assert_eq!(g[1], full[6]);
        assert_eq!(thinned_grid(LAMBDA_GRID_LEN, 100), full);
    }

    #[test]
    fn grid_spec() {
        assert_eq!(parse_grid("t", "22:25:1").ok().unwrap(), vec![22.0, 23.0, 24.0, 25.0]);
        assert_eq!(parse_grid("t", "0:1:0.5").ok().unwrap(), vec![0.0, 0.5, 1.0]);
        for bad in ["1:0:1", "0:1", "0:1:0", "a:b:c"] {
            assert!(parse_grid("t", bad).is_err(), "{bad}");
        }
    }
}
