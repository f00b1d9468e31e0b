use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cae_youden::bench::{run_plan, BenchPlan, Method};
use cae_youden::cae::{cv_select_lambda, FitConfig};
use cae_youden::kernels::{gram_with, KernelSpec};
use cae_youden::simulate::{generate, Example, SimSpec};
use cae_youden::{log_grid, Exec};

const MODES: [Exec; 2] = [Exec::Sequential, Exec::Parallel];

fn gram(c: &mut Criterion) {
    let d = generate(&SimSpec { example: Example::Three, n: 500, seed: 1 }).unwrap();
    let profiles = d.profiles();
    let kernel = KernelSpec::Gaussian { sigma: 1.0 };
    let mut g = c.benchmark_group("gram_500");
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| gram_with(black_box(&profiles), &kernel, exec).unwrap())
        });
    }
    g.finish();
}

fn replications(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_plan_example1_n100");
    g.sample_size(10);
    for exec in MODES {
        let mut plan = BenchPlan::new(Example::One);
        plan.n_list = vec![100];
        plan.replications = 8;
        plan.lambda_grid = log_grid(61).into_iter().step_by(6).collect();
        plan.methods = vec![Method::Cae];
        plan.exec = exec;
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &plan, |b, plan| {
            b.iter(|| run_plan(black_box(plan)).unwrap())
        });
    }
    g.finish();
}

fn cross_validation(c: &mut Criterion) {
    let d = generate(&SimSpec { example: Example::One, n: 200, seed: 2 }).unwrap();
    let grid: Vec<f64> = log_grid(61).into_iter().step_by(6).collect();
    let cfg = FitConfig::default();
    let mut g = c.benchmark_group("cv_5fold_n200");
    g.sample_size(10);
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| cv_select_lambda(black_box(&d), &cfg, &grid, 5, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, gram, replications, cross_validation);
criterion_main!(benches);
