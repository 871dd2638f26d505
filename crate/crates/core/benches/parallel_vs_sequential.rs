use std::hint::black_box;
use std::sync::Arc;
use std::time::Duration;

use autotune::data;
use autotune::exec::Execution;
use autotune::learners::{BoostConfig, LearnerConfig, LearnerKind};
use autotune::tuner::{alpha_grid_cv, genetic_search, EvaluationStrategy, GaOptions, Objective};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn ga_population(c: &mut Criterion) {
    let sonar = Arc::new(data::bundled("sonar").unwrap());
    let mut group = c.benchmark_group("ga_svm_sonar");
    group.sample_size(10).measurement_time(Duration::from_secs(10));
    for (name, mode) in MODES {
        let obj = Objective::new(sonar.clone(), LearnerKind::Svm, EvaluationStrategy::FastHoldout { fraction: 0.5 }, 1)
            .unwrap()
            .with_execution(Execution::Sequential);
        let opts = GaOptions { population: 16, generations: 2, seed: 3, execution: mode, ..GaOptions::default() };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(genetic_search(&obj, obj.space(), &opts).unwrap().best_loss))
        });
    }
    group.finish();
}

fn cv_folds(c: &mut Criterion) {
    let pima = Arc::new(data::bundled("pima").unwrap());
    let cfg = LearnerConfig::Gbm(BoostConfig { n_trees: 100, depth: 3, shrinkage: 0.1, min_node: 10 });
    let mut group = c.benchmark_group("cv10_gbm_pima");
    group.sample_size(10).measurement_time(Duration::from_secs(10));
    for (name, mode) in MODES {
        let obj = Objective::new(pima.clone(), LearnerKind::Gbm, EvaluationStrategy::CrossValidation { k: 10 }, 1)
            .unwrap()
            .with_execution(mode);
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| black_box(obj.evaluate_config(&cfg))));
    }
    group.finish();
}

fn alpha_grid(c: &mut Criterion) {
    let bc = data::bundled("breast-cancer").unwrap();
    let folds = data::vfold(&bc, 5, true, 1).unwrap();
    let mut group = c.benchmark_group("alpha_grid_breast_cancer");
    group.sample_size(10).measurement_time(Duration::from_secs(10));
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(alpha_grid_cv(&bc, &folds, mode).len()))
        });
    }
    group.finish();
}

criterion_group!(benches, ga_population, cv_folds, alpha_grid);
criterion_main!(benches);
