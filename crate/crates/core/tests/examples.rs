macro_rules! example {
    ($module:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(momentum_schedule, "momentum_schedule.rs");
example!(lasso_adaptive_restart, "lasso_adaptive_restart.rs");
example!(logistic_duality_gap, "logistic_duality_gap.rs");
example!(fixed_period_restart, "fixed_period_restart.rs");
example!(libsvm_dataset, "libsvm_dataset.rs");
example!(benchmark_grid, "benchmark_grid.rs");
example!(objective_accuracy, "objective_accuracy.rs");
example!(custom_smooth_term, "custom_smooth_term.rs");

#[test]
fn momentum_schedule_runs() {
    momentum_schedule::run().unwrap();
}

#[test]
fn lasso_adaptive_restart_runs() {
    lasso_adaptive_restart::run().unwrap();
}

#[test]
fn logistic_duality_gap_runs() {
    logistic_duality_gap::run().unwrap();
}

#[test]
fn fixed_period_restart_runs() {
    fixed_period_restart::run().unwrap();
}

#[test]
fn libsvm_dataset_runs() {
    libsvm_dataset::run().unwrap();
}

#[test]
fn benchmark_grid_runs() {
    benchmark_grid::run().unwrap();
}

#[test]
fn objective_accuracy_runs() {
    objective_accuracy::run().unwrap();
}

#[test]
fn custom_smooth_term_runs() {
    custom_smooth_term::run().unwrap();
}
