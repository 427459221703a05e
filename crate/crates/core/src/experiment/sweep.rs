use super::{
    analytic_prediction_with, estimate_averages_with, run_experiment_with, AnalyticPrediction, Context, CountsTable,
    ExperimentError, ExperimentOptions, ImperfectionModel, InequalityReport, Theory,
};

/// Both contexts of one parameter point, their estimate and the exact
/// prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub theory: Theory,
    /// Swept parameter path and its value; `None` for a single run.
    pub param: Option<(String, f64)>,
    /// Trials per context.
    pub trials: u64,
    pub seed: u64,
    pub counts_a: CountsTable,
    pub counts_b: CountsTable,
    pub report: InequalityReport,
    pub exact: AnalyticPrediction,
}

/// Runs `trials` trials in each context and estimates the inequality.
pub fn run_inequality(
    theory: Theory,
    imp: &ImperfectionModel,
    trials: u64,
    seed: u64,
    opts: &ExperimentOptions,
) -> Result<ExperimentRow, ExperimentError> {
    let exact = analytic_prediction_with(theory, imp, opts)?;
    let counts_a = run_experiment_with(theory, Context::A, imp, trials, seed, opts)?;
    let counts_b = run_experiment_with(theory, Context::B, imp, trials, seed, opts)?;
    let report = estimate_averages_with(&counts_a, &counts_b, opts.fair_sampling)?;
    Ok(ExperimentRow { theory, param: None, trials, seed, counts_a, counts_b, report, exact })
}

/// One row per value, in the given order, each run with the same seed.
/// The path is checked even when `values` is empty.
pub fn sweep(
    theory: Theory,
    base: &ImperfectionModel,
    param: &str,
    values: &[f64],
    trials: u64,
    seed: u64,
    opts: &ExperimentOptions,
) -> Result<Vec<ExperimentRow>, ExperimentError> {
    base.clone().set(param, 0.0)?;
    let mut points = Vec::with_capacity(values.len());
    let mut issues = Vec::new();
    for &v in values {
        let mut imp = *base;
        imp.set(param, v)?;
        issues.extend(imp.issues());
        points.push(imp);
    }
    if !issues.is_empty() {
        return Err(ExperimentError::InvalidParameters(issues));
    }
    points
        .iter()
        .zip(values)
        .map(|(imp, &v)| {
            let mut row = run_inequality(theory, imp, trials, seed, opts)?;
            row.param = Some((param.to_string(), v));
            Ok(row)
        })
        .collect()
}
