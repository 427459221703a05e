use crate::observables::{detector_values, JointOutcome};
use crate::optics::DetectorId;

use super::{Context, CountsTable, ExperimentError};

/// Estimated ensemble averages and the inequality's left-hand side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityReport {
    pub avg_z1z2: f64,
    pub se_z1z2: f64,
    pub avg_x1x2: f64,
    pub se_x1x2: f64,
    pub avg_product: f64,
    pub se_product: f64,
    /// `|1 + ⟨Z1Z2⟩ + ⟨X1X2⟩ − ⟨Z1X2·X1Z2⟩|`
    pub lhs: f64,
    pub lhs_se: f64,
    /// `(lhs − 2) / lhs_se`; ±∞ (or 0 at exactly 2) when `lhs_se` is 0.
    pub violation_sigma: f64,
}

/// Noncontextual bound on the left-hand side.
pub const NCHV_BOUND: f64 = 2.0;

/// Mean and standard error of a ±1-valued (or 0 for undetected) sample
/// described by weights over its values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub n: f64,
}

impl Moments {
    /// `values[k]` observed with weight `weights[k]`, out of `n` samples in
    /// total (samples not covered by the weights contribute value 0).
    pub fn from_weights(weights: &[f64], values: &[f64], n: f64) -> Self {
        let s1: f64 = weights.iter().zip(values).map(|(w, v)| w * v).sum();
        let s2: f64 = weights.iter().zip(values).map(|(w, v)| w * v * v).sum();
        let mean = s1 / n;
        let variance = (s2 / n - mean * mean).max(0.0);
        Moments { mean, variance, n }
    }

    pub fn standard_error(&self) -> f64 {
        (self.variance / self.n).sqrt()
    }
}

fn product_values() -> [f64; 8] {
    DetectorId::ALL.map(|d| f64::from(detector_values(d).product.value()))
}

fn joint_values() -> ([f64; 4], [f64; 4], [f64; 4]) {
    let zz = JointOutcome::ALL.map(|o| f64::from(o.first.value()));
    let xx = JointOutcome::ALL.map(|o| f64::from(o.second.value()));
    let sum = std::array::from_fn(|k| zz[k] + xx[k]);
    (zz, xx, sum)
}

pub(crate) fn sigma(lhs: f64, se: f64) -> f64 {
    let excess = lhs - NCHV_BOUND;
    if se > 0.0 {
        excess / se
    } else if excess == 0.0 {
        0.0
    } else {
        excess.signum() * f64::INFINITY
    }
}

/// Builds the report from weights over context-A detectors and context-B
/// joint outcomes. `n_a`, `n_b` are the sample sizes the averages divide by.
pub(crate) fn report_from_weights(wa: &[f64; 8], wb: &[f64; 4], n_a: f64, n_b: f64) -> InequalityReport {
    let prod = Moments::from_weights(wa, &product_values(), n_a);
    let (zz_v, xx_v, sum_v) = joint_values();
    let zz = Moments::from_weights(wb, &zz_v, n_b);
    let xx = Moments::from_weights(wb, &xx_v, n_b);
    let both = Moments::from_weights(wb, &sum_v, n_b);

    let lhs = (1.0 + zz.mean + xx.mean - prod.mean).abs();
    // Z1Z2 and X1X2 come from the same trials, so their covariance enters
    // through the variance of their per-trial sum.
    let lhs_se = (both.variance / n_b + prod.variance / n_a).sqrt();
    InequalityReport {
        avg_z1z2: zz.mean,
        se_z1z2: zz.standard_error(),
        avg_x1x2: xx.mean,
        se_x1x2: xx.standard_error(),
        avg_product: prod.mean,
        se_product: prod.standard_error(),
        lhs,
        lhs_se,
        violation_sigma: sigma(lhs, lhs_se),
    }
}

/// Estimates the averages from detected counts only.
pub fn estimate_averages(a: &CountsTable, b: &CountsTable) -> Result<InequalityReport, ExperimentError> {
    estimate_averages_with(a, b, true)
}

/// With `fair_sampling` the averages are conditioned on detection; without
/// it every trial counts and undetected trials contribute 0.
pub fn estimate_averages_with(
    a: &CountsTable,
    b: &CountsTable,
    fair_sampling: bool,
) -> Result<InequalityReport, ExperimentError> {
    for (table, expected) in [(a, Context::A), (b, Context::B)] {
        if table.context != expected {
            return Err(ExperimentError::WrongContext { expected, found: table.context });
        }
    }
    let det_a: u64 = a.context_a.iter().sum();
    let det_b: u64 = b.context_b.iter().sum();
    if det_a == 0 {
        return Err(ExperimentError::InsufficientData(Context::A));
    }
    if det_b == 0 {
        return Err(ExperimentError::InsufficientData(Context::B));
    }
    let wa = a.context_a.map(|c| c as f64);
    let wb = b.context_b.map(|c| c as f64);
    let (n_a, n_b) = if fair_sampling { (det_a as f64, det_b as f64) } else { (a.trials as f64, b.trials as f64) };
    Ok(report_from_weights(&wa, &wb, n_a, n_b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_a(counts: [u64; 8]) -> CountsTable {
        let mut t = CountsTable::empty(Context::A);
        t.context_a = counts;
        t.trials = counts.iter().sum();
        t
    }

    fn table_b(counts: [u64; 4]) -> CountsTable {
        let mut t = CountsTable::empty(Context::B);
        t.context_b = counts;
        t.trials = counts.iter().sum();
        t
    }

    #[test]
    fn concentrated_on_d2() {
        let r = estimate_averages(&table_a([0, 100, 0, 0, 0, 0, 0, 0]), &table_b([50, 0, 0, 0])).unwrap();
        assert_eq!(r.avg_product, 1.0);
        assert_eq!(r.lhs, 2.0);
        assert_eq!(r.lhs_se, 0.0);
        assert_eq!(r.violation_sigma, 0.0);
    }

    #[test]
    fn ideal_quantum_pattern() {
        let r = estimate_averages(&table_a([25, 0, 0, 25, 0, 25, 25, 0]), &table_b([100, 0, 0, 0])).unwrap();
        assert_eq!(r.avg_product, -1.0);
        assert_eq!(r.lhs, 4.0);
        assert_eq!(r.violation_sigma, f64::INFINITY);
    }

    #[test]
    fn standard_errors_by_hand() {
        // A: 30 at D1 (−1), 10 at D2 (+1): mean −0.5, var 0.75, se sqrt(0.75/40).
        // B: 20 (+,+), 20 (+,−): zz 1, xx 0; z+x ∈ {2, 0} → var 1, se² 1/40.
        let r = estimate_averages(&table_a([30, 10, 0, 0, 0, 0, 0, 0]), &table_b([20, 20, 0, 0])).unwrap();
        assert!((r.avg_product + 0.5).abs() < 1e-15);
        assert!((r.se_product - (0.75f64 / 40.0).sqrt()).abs() < 1e-15);
        assert_eq!(r.avg_z1z2, 1.0);
        assert_eq!(r.se_z1z2, 0.0);
        assert!((r.se_x1x2 - (1.0f64 / 40.0).sqrt()).abs() < 1e-15);
        assert!((r.lhs - 2.5).abs() < 1e-15);
        let se = (1.0 / 40.0 + 0.75 / 40.0f64).sqrt();
        assert!((r.lhs_se - se).abs() < 1e-15);
        assert!((r.violation_sigma - 0.5 / se).abs() < 1e-12);
    }

    #[test]
    fn no_fair_sampling_counts_misses_as_zero() {
        let mut a = table_a([10, 0, 0, 0, 0, 0, 0, 0]);
        a.no_detection = 10;
        a.trials = 20;
        let mut b = table_b([10, 0, 0, 0]);
        b.no_detection = 10;
        b.trials = 20;
        let r = estimate_averages_with(&a, &b, false).unwrap();
        assert_eq!(r.avg_product, -0.5);
        assert_eq!(r.avg_z1z2, 0.5);
        assert_eq!(r.lhs, 2.5);
    }

    #[test]
    fn empty_context_is_insufficient() {
        let mut a = table_a([0; 8]);
        a.no_detection = 5;
        let err = estimate_averages(&a, &table_b([1, 0, 0, 0])).unwrap_err();
        assert!(matches!(err, ExperimentError::InsufficientData(Context::A)));
        let err = estimate_averages(&table_a([1; 8]), &table_b([0; 4])).unwrap_err();
        assert!(matches!(err, ExperimentError::InsufficientData(Context::B)));
    }

    #[test]
    fn swapped_tables_rejected() {
        let a = table_a([1; 8]);
        let b = table_b([1; 4]);
        assert!(matches!(estimate_averages(&b, &a), Err(ExperimentError::WrongContext { .. })));
    }
}
