//! Monte-Carlo harness: replicated simulation, oracle tuning against the
//! known truth, EISE summaries and table output.

use std::fmt::Write as _;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::cae::{dca_solve, FitConfig, Problem};
use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::nrm::nrm_fit;
use crate::simulate::{generate, Example, SimSpec, TruthOracle};
use crate::{log_grid, BANDWIDTH_GRID_LEN, LAMBDA_GRID_LEN};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cae,
    Nrm,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Cae => "CAE",
            Method::Nrm => "NRM",
        }
    }
}

/// How the oracle picks λ and h.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tuning {
    /// Separately in every replication.
    #[default]
    PerReplication,
    /// One value for all replications, minimizing the mean error.
    Shared,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchPlan {
    pub example: Example,
    pub n_list: Vec<usize>,
    pub replications: usize,
    pub lambda_grid: Vec<f64>,
    pub h_grid: Vec<f64>,
    pub methods: Vec<Method>,
    pub base_seed: u64,
    pub tuning: Tuning,
    /// δ, kernel, initialization and solver settings; `lambda` is ignored.
    pub fit: FitConfig,
    pub exec: Exec,
}

impl BenchPlan {
    pub fn new(example: Example) -> Self {
        BenchPlan {
            example,
            n_list: vec![100, 250, 500],
            replications: 50,
            lambda_grid: log_grid(LAMBDA_GRID_LEN),
            h_grid: log_grid(BANDWIDTH_GRID_LEN),
            methods: vec![Method::Cae, Method::Nrm],
            base_seed: 0,
            tuning: Tuning::PerReplication,
            fit: FitConfig::default(),
            exec: Exec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidInput("replications must be >= 1".into()));
        }
        if self.lambda_grid.is_empty() || self.h_grid.is_empty() {
            return Err(Error::InvalidInput("tuning grids must be nonempty".into()));
        }
        if self.n_list.iter().any(|&n| n < 4) {
            return Err(Error::InvalidInput("sample sizes must be >= 4".into()));
        }
        for &v in self.lambda_grid.iter().chain(&self.h_grid) {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("grid values must be finite and > 0, got {v}")));
            }
        }
        self.fit.validate()
    }
}

/// Mean squared difference.
pub fn eise(estimates: &[f64], truths: &[f64]) -> Result<f64> {
    if estimates.len() != truths.len() {
        return Err(Error::DimensionMismatch {
            expected: truths.len(),
            got: estimates.len(),
        });
    }
    if estimates.is_empty() {
        return Err(Error::InvalidInput("eise needs at least one value".into()));
    }
    let s: f64 = estimates.iter().zip(truths).map(|(e, t)| (e - t) * (e - t)).sum();
    Ok(s / estimates.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Denominator `len - 1`; zero for a single value.
    pub sd: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Summary {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let sd = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Summary { mean, sd }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub method: Method,
    pub n: usize,
    pub eise_c: Summary,
    pub eise_j: Summary,
    /// Per successful replication, in seed order.
    pub raw_c: Vec<f64>,
    pub raw_j: Vec<f64>,
    /// Oracle choices per successful replication (CAE only).
    pub lambdas: Vec<f64>,
    pub bandwidths: Vec<f64>,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub example: Example,
    pub replications: usize,
    pub cells: Vec<Cell>,
}

impl BenchResult {
    pub fn cell(&self, method: Method, n: usize) -> Option<&Cell> {
        self.cells.iter().find(|c| c.method == method && c.n == n)
    }
}

/// Per-replication material shared by the tuning rules.
struct Replicate {
    data: Dataset,
    true_j: Vec<f64>,
    /// `(EISE_c, ĉ at the training profiles)` per λ; `None` if the fit failed.
    cae: Option<Vec<Option<(f64, Vec<f64>)>>>,
    nrm: Option<(f64, f64)>,
}

fn replicate(plan: &BenchPlan, n: usize, r: usize) -> Result<Replicate> {
    let seed = plan.base_seed + r as u64;
    let data = generate(&SimSpec {
        example: plan.example,
        n,
        seed,
    })?;
    data.require_both_classes()?;
    let oracle = TruthOracle::new(plan.example);
    let mut true_c = Vec::with_capacity(n);
    let mut true_j = Vec::with_capacity(n);
    for s in data.samples() {
        true_c.push(oracle.true_cut(&s.z)?);
        true_j.push(oracle.true_youden(&s.z)?);
    }

    let cae = if plan.methods.contains(&Method::Cae) {
        let p = Problem::new(&data, plan.fit.delta, plan.fit.kernel, Exec::Sequential)?;
        let per_lambda: Vec<Option<(f64, Vec<f64>)>> = plan
            .lambda_grid
            .iter()
            .map(|&lambda| match dca_solve(&p, lambda, &plan.fit) {
                Ok(sol) => {
                    let c_hat = p.fitted(&sol.a, sol.b);
                    let e = eise(&c_hat, &true_c).ok()?;
                    Some((e, c_hat))
                }
                Err(e) => {
                    warn!("seed {seed}, n {n}, lambda {lambda}: {e}");
                    None
                }
            })
            .collect();
        if per_lambda.iter().all(Option::is_none) {
            return Err(Error::Degenerate(format!("every lambda failed for seed {seed}")));
        }
        Some(per_lambda)
    } else {
        None
    };

    let nrm = if plan.methods.contains(&Method::Nrm) {
        let m = nrm_fit(&data)?;
        let mut c_hat = Vec::with_capacity(n);
        let mut j_hat = Vec::with_capacity(n);
        for s in data.samples() {
            c_hat.push(m.cut(&s.z)?);
            j_hat.push(m.youden(&s.z)?);
        }
        Some((eise(&c_hat, &true_c)?, eise(&j_hat, &true_j)?))
    } else {
        None
    };

    Ok(Replicate {
        data,
        true_j,
        cae,
        nrm,
    })
}

/// Squared covariate distances between all training profiles, split by the
/// class of the second index.
struct Distances {
    d2: Vec<Vec<f64>>,
}

impl Distances {
    fn new(d: &Dataset) -> Self {
        let zs = d.profiles();
        let d2 = zs
            .iter()
            .map(|a| {
                zs.iter()
                    .map(|b| a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum())
                    .collect()
            })
            .collect();
        Distances { d2 }
    }
}

/// EISE of `Ĵ` at the training profiles with tied bandwidth `h`, or
/// infinity if some profile has no smoothing weight.
fn eise_j_at(rep: &Replicate, dist: &Distances, c_hat: &[f64], h: f64) -> f64 {
    let scale = 1.0 / (2.0 * h * h);
    let samples = rep.data.samples();
    let mut j_hat = Vec::with_capacity(samples.len());
    for (i, row) in dist.d2.iter().enumerate() {
        let (mut num_pos, mut den_pos, mut num_neg, mut den_neg) = (0.0, 0.0, 0.0, 0.0);
        for (s, &d2) in samples.iter().zip(row) {
            let w = (-d2 * scale).exp();
            let below = if s.x <= c_hat[i] { w } else { 0.0 };
            match s.y {
                Label::Pos => {
                    den_pos += w;
                    num_pos += below;
                }
                Label::Neg => {
                    den_neg += w;
                    num_neg += below;
                }
            }
        }
        if !(den_pos >= 1e-300 && den_neg >= 1e-300) {
            return f64::INFINITY;
        }
        j_hat.push(num_neg / den_neg - num_pos / den_pos);
    }
    eise(&j_hat, &rep.true_j).unwrap_or(f64::INFINITY)
}

/// Index of the smallest value; ties go to the lower index.
fn argmin(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (k, v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        if best.is_none_or(|b| *v < values[b]) {
            best = Some(k);
        }
    }
    best
}

fn lambda_errors(rep: &Replicate) -> Vec<f64> {
    rep.cae
        .as_ref()
        .map(|v| v.iter().map(|e| e.as_ref().map_or(f64::INFINITY, |x| x.0)).collect())
        .unwrap_or_default()
}

struct CaeOutcome {
    eise_c: f64,
    eise_j: f64,
    lambda: f64,
    h: f64,
}

fn tune_cae(plan: &BenchPlan, reps: &[&Replicate]) -> Vec<CaeOutcome> {
    let dists: Vec<Distances> = plan.exec.map(reps, |r| Distances::new(&r.data));
    let j_errors = |rep: &Replicate, dist: &Distances, k: usize| -> Vec<f64> {
        let c_hat = &rep.cae.as_ref().expect("cae results")[k].as_ref().expect("successful fit").1;
        plan.h_grid.iter().map(|&h| eise_j_at(rep, dist, c_hat, h)).collect()
    };
    match plan.tuning {
        Tuning::PerReplication => {
            let idx: Vec<usize> = (0..reps.len()).collect();
            plan.exec.map(&idx, |&i| {
                let errs = lambda_errors(reps[i]);
                let k = argmin(&errs).expect("at least one finite lambda");
                debug_assert!(errs.iter().all(|e| errs[k] <= *e));
                let je = j_errors(reps[i], &dists[i], k);
                let m = argmin(&je).unwrap_or(0);
                CaeOutcome {
                    eise_c: errs[k],
                    eise_j: je[m],
                    lambda: plan.lambda_grid[k],
                    h: plan.h_grid[m],
                }
            })
        }
        Tuning::Shared => {
            let per_rep: Vec<Vec<f64>> = reps.iter().map(|r| lambda_errors(r)).collect();
            let means: Vec<f64> = (0..plan.lambda_grid.len())
                .map(|k| per_rep.iter().map(|e| e[k]).sum::<f64>() / reps.len() as f64)
                .collect();
            let k = argmin(&means).unwrap_or(0);
            if !means[k].is_finite() {
                warn!("no lambda succeeded in every replication");
            }
            let idx: Vec<usize> = (0..reps.len()).collect();
            let je: Vec<Vec<f64>> = plan.exec.map(&idx, |&i| {
                if reps[i].cae.as_ref().expect("cae results")[k].is_some() {
                    j_errors(reps[i], &dists[i], k)
                } else {
                    vec![f64::INFINITY; plan.h_grid.len()]
                }
            });
            let h_means: Vec<f64> = (0..plan.h_grid.len())
                .map(|m| je.iter().map(|e| e[m]).sum::<f64>() / reps.len() as f64)
                .collect();
            let m = argmin(&h_means).unwrap_or(0);
            (0..reps.len())
                .map(|i| CaeOutcome {
                    eise_c: per_rep[i][k],
                    eise_j: je[i][m],
                    lambda: plan.lambda_grid[k],
                    h: plan.h_grid[m],
                })
                .collect()
        }
    }
}

fn check_failures(failed: usize, total: usize) -> Result<()> {
    if failed * 10 > total {
        return Err(Error::TooManyFailures { failed, total });
    }
    Ok(())
}

/// Runs every `(n, replication)` pair. Replication `r` uses seed
/// `base_seed + r`; failures are excluded and counted.
pub fn run_plan(plan: &BenchPlan) -> Result<BenchResult> {
    plan.validate()?;
    let mut methods = plan.methods.clone();
    methods.sort();
    methods.dedup();
    let mut cells = Vec::new();
    for &n in &plan.n_list {
        let outcomes: Vec<Result<Replicate>> = plan.exec.map_range(plan.replications, |r| replicate(plan, n, r));
        let mut reps = Vec::new();
        let mut failures = 0;
        for (r, o) in outcomes.iter().enumerate() {
            match o {
                Ok(rep) => reps.push(rep),
                Err(e) => {
                    warn!("replication {r} (n = {n}) failed: {e}");
                    failures += 1;
                }
            }
        }
        check_failures(failures, plan.replications)?;
        for &method in &methods {
            let cell = match method {
                Method::Nrm => {
                    let (raw_c, raw_j): (Vec<f64>, Vec<f64>) =
                        reps.iter().map(|r| r.nrm.expect("nrm requested")).unzip();
                    Cell {
                        method,
                        n,
                        eise_c: Summary::of(&raw_c),
                        eise_j: Summary::of(&raw_j),
                        raw_c,
                        raw_j,
                        lambdas: vec![],
                        bandwidths: vec![],
                        failures,
                    }
                }
                Method::Cae => {
                    let out = tune_cae(plan, &reps);
                    let raw_c: Vec<f64> = out.iter().map(|o| o.eise_c).collect();
                    let raw_j: Vec<f64> = out.iter().map(|o| o.eise_j).collect();
                    Cell {
                        method,
                        n,
                        eise_c: Summary::of(&raw_c),
                        eise_j: Summary::of(&raw_j),
                        raw_c,
                        raw_j,
                        lambdas: out.iter().map(|o| o.lambda).collect(),
                        bandwidths: out.iter().map(|o| o.h).collect(),
                        failures,
                    }
                }
            };
            cells.push(cell);
        }
    }
    Ok(BenchResult {
        example: plan.example,
        replications: plan.replications,
        cells,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Markdown,
}

/// `"0.048 (0.0398)"`.
pub fn format_cell(s: &Summary) -> String {
    format!("{:.3} ({:.4})", s.mean, s.sd)
}

fn markdown_table(out: &mut String, title: &str, result: &BenchResult, ns: &[usize], metric: fn(&Cell) -> &Summary) {
    let mut methods: Vec<Method> = result.cells.iter().map(|c| c.method).collect();
    methods.sort();
    methods.dedup();
    let _ = writeln!(out, "{title}\n");
    let _ = write!(out, "| method |");
    for n in ns {
        let _ = write!(out, " n={n} |");
    }
    let _ = write!(out, "\n|---|");
    for _ in ns {
        let _ = write!(out, "---|");
    }
    out.push('\n');
    for m in methods {
        let _ = write!(out, "| {} |", m.name());
        for &n in ns {
            match result.cell(m, n) {
                Some(c) => {
                    let _ = write!(out, " {} |", format_cell(metric(c)));
                }
                None => out.push_str(" |"),
            }
        }
        out.push('\n');
    }
}

/// Markdown has one table per metric with methods as rows and sample sizes
/// as columns; CSV has one row per `(method, n, metric)`.
pub fn emit_table(result: &BenchResult, format: TableFormat) -> String {
    let mut ns: Vec<usize> = result.cells.iter().map(|c| c.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            out.push_str("method,n,metric,mean,sd\n");
            for c in &result.cells {
                for (metric, s) in [("eise_c", &c.eise_c), ("eise_j", &c.eise_j)] {
                    let _ = writeln!(out, "{},{},{},{},{}", c.method.name(), c.n, metric, s.mean, s.sd);
                }
            }
        }
        TableFormat::Markdown => {
            let ex = result.example.id();
            markdown_table(&mut out, &format!("EISE of c(z), example {ex}"), result, &ns, |c| &c.eise_c);
            out.push('\n');
            markdown_table(&mut out, &format!("EISE of J(z), example {ex}"), result, &ns, |c| &c.eise_j);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eise_examples() {
        assert_eq!(eise(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(eise(&[2.0, 3.0, -1.0], &[1.0, 2.0, -2.0]).unwrap(), 1.0);
        assert_eq!(eise(&[0.0, 0.0], &[1.0, 3.0]).unwrap(), 5.0);
        assert!(eise(&[0.0], &[1.0, 3.0]).is_err());
        assert!(eise(&[], &[]).is_err());
    }

    #[test]
    fn summary_uses_sample_sd() {
        let s = Summary::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(Summary::of(&[7.0]).sd, 0.0);
    }

    #[test]
    fn cell_formatting() {
        assert_eq!(format_cell(&Summary { mean: 0.048, sd: 0.0398 }), "0.048 (0.0398)");
        assert_eq!(format_cell(&Summary { mean: 15.352, sd: 1.0 }), "15.352 (1.0000)");
    }

    #[test]
    fn argmin_prefers_lower_index() {
        assert_eq!(argmin(&[3.0, 1.0, 1.0]), Some(1));
        assert_eq!(argmin(&[f64::NAN, 2.0]), Some(1));
        assert_eq!(argmin(&[f64::INFINITY, f64::INFINITY]), Some(0));
        assert_eq!(argmin(&[]), None);
    }

    #[test]
    fn empty_tables() {
        let r = BenchResult {
            example: Example::One,
            replications: 1,
            cells: vec![],
        };
        assert_eq!(emit_table(&r, TableFormat::Csv), "method,n,metric,mean,sd\n");
        let md = emit_table(&r, TableFormat::Markdown);
        assert!(md.contains("| method |\n|---|\n\n"));
    }

    #[test]
    fn failure_threshold() {
        assert!(check_failures(5, 50).is_ok());
        assert!(check_failures(6, 50).is_err());
    }

    #[test]
    fn smoothed_error_matches_direct_smoother() {
        let data = generate(&SimSpec { example: Example::One, n: 40, seed: 3 }).unwrap();
        let oracle = TruthOracle::new(Example::One);
        let true_j: Vec<f64> = data.samples().iter().map(|s| oracle.true_youden(&s.z).unwrap()).collect();
        let c_hat: Vec<f64> = data.samples().iter().map(|s| 9.0 + s.z[0]).collect();
        let rep = Replicate {
            data: data.clone(),
            true_j: true_j.clone(),
            cae: None,
            nrm: None,
        };
        let h = 0.7;
        let fast = eise_j_at(&rep, &Distances::new(&data), &c_hat, h);
        let cfg = crate::youden::SmootherConfig::tied(h).unwrap();
        let direct: Vec<f64> = data
            .samples()
            .iter()
            .zip(&c_hat)
            .map(|(s, &c)| crate::youden::youden_at(&data, c, &s.z, &cfg).unwrap())
            .collect();
        assert!((fast - eise(&direct, &true_j).unwrap()).abs() < 1e-14);
    }
}
