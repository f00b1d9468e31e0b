use cae_youden::bench::{emit_table, run_plan, BenchPlan, Method, TableFormat, Tuning};
use cae_youden::cae::{dca_fit, FitConfig};
use cae_youden::dataset::{load_csv, CsvSchema, Label};
use cae_youden::simulate::{generate, Example, SimSpec, TruthOracle};
use cae_youden::special::{gamma_p, normal_cdf};
use cae_youden::{log_grid, Exec};

fn small_plan(example: Example) -> BenchPlan {
    let mut plan = BenchPlan::new(example);
    plan.n_list = vec![60];
    plan.replications = 4;
    plan.lambda_grid = log_grid(61).into_iter().step_by(10).collect();
    plan.h_grid = log_grid(41).into_iter().step_by(8).collect();
    plan.base_seed = 11;
    plan
}

#[test]
fn bench_is_deterministic_and_order_independent() {
    let mut plan = small_plan(Example::One);
    plan.exec = Exec::Parallel;
    let a = run_plan(&plan).unwrap();
    let b = run_plan(&plan).unwrap();
    assert_eq!(a, b);
    plan.exec = Exec::Sequential;
    assert_eq!(run_plan(&plan).unwrap(), a);
}

#[test]
fn bench_cells_and_tables() {
    let mut plan = small_plan(Example::Two);
    plan.n_list = vec![40, 80];
    let r = run_plan(&plan).unwrap();
    assert_eq!(r.cells.len(), 4);
    for c in &r.cells {
        assert_eq!(c.raw_c.len() + c.failures, plan.replications);
        assert!(c.raw_c.iter().chain(&c.raw_j).all(|v| v.is_finite() && *v >= 0.0));
        if c.method == Method::Cae {
            assert!(c.lambdas.iter().all(|l| plan.lambda_grid.contains(l)));
            assert!(c.bandwidths.iter().all(|h| plan.h_grid.contains(h)));
        }
    }
    let csv = emit_table(&r, TableFormat::Csv);
    assert_eq!(csv.lines().count(), 1 + 2 * 4);
    let md = emit_table(&r, TableFormat::Markdown);
    assert!(md.contains("| CAE |") && md.contains("n=80"));
}

#[test]
fn shared_tuning_uses_one_value() {
    let mut plan = small_plan(Example::One);
    plan.tuning = Tuning::Shared;
    plan.methods = vec![Method::Cae];
    let r = run_plan(&plan).unwrap();
    let c = r.cell(Method::Cae, 60).unwrap();
    assert!(c.lambdas.windows(2).all(|w| w[0] == w[1]));
    assert!(c.bandwidths.windows(2).all(|w| w[0] == w[1]));
    // per-replication tuning can only do better on each replication
    plan.tuning = Tuning::PerReplication;
    let own = run_plan(&plan).unwrap();
    let o = own.cell(Method::Cae, 60).unwrap();
    for (a, b) in o.raw_c.iter().zip(&c.raw_c) {
        assert!(a <= b);
    }
}

#[test]
fn invalid_plans_are_rejected() {
    let mut plan = small_plan(Example::One);
    plan.replications = 0;
    assert!(run_plan(&plan).is_err());
    let mut plan = small_plan(Example::One);
    plan.lambda_grid.clear();
    assert!(run_plan(&plan).is_err());
}

#[test]
fn cut_point_error_shrinks_with_sample_size() {
    let mut plan = small_plan(Example::One);
    plan.n_list = vec![60, 400];
    plan.replications = 6;
    plan.methods = vec![Method::Cae];
    let r = run_plan(&plan).unwrap();
    let small = r.cell(Method::Cae, 60).unwrap().eise_c.mean;
    let large = r.cell(Method::Cae, 400).unwrap().eise_c.mean;
    assert!(large < small, "{large} vs {small}");
}

#[test]
fn simulated_marker_means_match_the_design() {
    // Example 1 controls: E[6 + 1.5 Z + 1.5 sin Z], Z ~ U(1, 5)
    let n = 40_000;
    let d = generate(&SimSpec { example: Example::One, n, seed: 5 }).unwrap();
    let controls: Vec<f64> = d.samples().iter().filter(|s| s.y == Label::Neg).map(|s| s.x).collect();
    let mean = controls.iter().sum::<f64>() / controls.len() as f64;
    let expected = 6.0 + 1.5 * 3.0 + 1.5 * (1f64.cos() - 5f64.cos()) / 4.0;
    // marginal sd is below 2.5
    let se = 2.5 / (controls.len() as f64).sqrt();
    assert!((mean - expected).abs() < 4.0 * se, "{mean} vs {expected}");
    let frac_pos = d.n_pos() as f64 / n as f64;
    assert!((frac_pos - 0.5).abs() < 4.0 * 0.5 / (n as f64).sqrt());

    // Example 2 controls at a fixed profile: gamma CDF against the
    // empirical CDF of draws restricted to a thin slice around z = 3
    let d = generate(&SimSpec { example: Example::Two, n: 200_000, seed: 6 }).unwrap();
    let slice: Vec<f64> = d
        .samples()
        .iter()
        .filter(|s| s.y == Label::Neg && (s.z[0] - 3.0).abs() < 0.02)
        .map(|s| s.x)
        .collect();
    let shape = 6.0 + 4.5 + 1.5 * 3f64.sin();
    let scale = (0.4 + normal_cdf(0.0)).sqrt();
    let median_draw = {
        let mut v = slice.clone();
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    let p = gamma_p(shape, median_draw / scale);
    assert!((p - 0.5).abs() < 4.0 * 0.5 / (slice.len() as f64).sqrt() + 0.02, "{p}");
}

#[test]
fn simulated_csv_round_trips_and_fits() {
    let d = generate(&SimSpec { example: Example::One, n: 300, seed: 9 }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sim.csv");
    d.write_csv(std::fs::File::create(&path).unwrap()).unwrap();
    let names: Vec<String> = d.covariate_names().to_vec();
    let back = load_csv(&path, &CsvSchema::signed(&names)).unwrap();
    assert_eq!(back, d);

    let m = dca_fit(&d, &FitConfig { lambda: 0.01, ..FitConfig::default() }).unwrap();
    let oracle = TruthOracle::new(Example::One);
    let err: f64 = d
        .samples()
        .iter()
        .map(|s| (m.predict(&s.z).unwrap() - oracle.true_cut(&s.z).unwrap()).powi(2))
        .sum::<f64>()
        / d.len() as f64;
    assert!(err < 0.5, "EISE {err}");
}

#[test]
fn three_dimensional_design_has_mean_profile_near_one() {
    let d = generate(&SimSpec { example: Example::Three, n: 5000, seed: 1 }).unwrap();
    for j in 0..3 {
        let m = d.samples().iter().map(|s| s.z[j]).sum::<f64>() / 5000.0;
        assert!((m - 1.0).abs() < 4.0 / 5000f64.sqrt());
    }
}
