//! Exact predictions for the Monte Carlo estimators.
//!
//! The quantum branch works with the prepared density operator and the
//! network's transfer matrix; the hidden-variable branch takes expectations
//! over the assignment distribution. Both then push the arrival
//! probabilities through the closed-form detection layer.

use crate::hilbert::PathFrame;
use crate::nchv::{assignment_to_detector, assignment_to_joint, enumerate_assignments};
use crate::observables::{context_b_probabilities, detector_values, JointOutcome};
use crate::optics::{build_fig1_network_with, DetectorId};

use super::detection::DetectionLayer;
use super::engine::prepared_density;
use super::estimate::{report_from_weights, sigma, InequalityReport};
use super::{ExperimentError, ExperimentOptions, ImperfectionModel, Theory};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticPrediction {
    pub avg_z1z2: f64,
    pub avg_x1x2: f64,
    pub avg_product: f64,
    pub lhs: f64,
    /// Photon arrival probabilities before detection.
    pub arrival_a: [f64; 8],
    pub arrival_b: [f64; 4],
    /// Per-trial probability of a click at each channel.
    pub recorded_a: [f64; 8],
    pub recorded_b: [f64; 4],
    pub fair_sampling: bool,
}

impl AnalyticPrediction {
    pub fn detect_prob_a(&self) -> f64 {
        self.recorded_a.iter().sum()
    }

    pub fn detect_prob_b(&self) -> f64 {
        self.recorded_b.iter().sum()
    }

    /// Report a run of `trials_a` / `trials_b` trials would give if every
    /// count sat at its expectation. Its standard errors are the sampling
    /// errors under this prediction.
    pub fn expected_report(&self, trials_a: u64, trials_b: u64) -> InequalityReport {
        let (ta, tb) = (trials_a as f64, trials_b as f64);
        let wa = self.recorded_a.map(|p| p * ta);
        let wb = self.recorded_b.map(|p| p * tb);
        let (n_a, n_b) =
            if self.fair_sampling { (self.detect_prob_a() * ta, self.detect_prob_b() * tb) } else { (ta, tb) };
        let mut r = report_from_weights(&wa, &wb, n_a, n_b);
        r.violation_sigma = sigma(r.lhs, r.lhs_se);
        r
    }
}

pub fn analytic_prediction(theory: Theory, imp: &ImperfectionModel) -> Result<AnalyticPrediction, ExperimentError> {
    analytic_prediction_with(theory, imp, &ExperimentOptions::default())
}

pub fn analytic_prediction_with(
    theory: Theory,
    imp: &ImperfectionModel,
    opts: &ExperimentOptions,
) -> Result<AnalyticPrediction, ExperimentError> {
    imp.validate()?;
    let (arrival_a, arrival_b) = match theory {
        Theory::Qm => {
            let rho = prepared_density(imp)?;
            let t = build_fig1_network_with(&imp.fig1_params()).transfer_matrix(PathFrame::Arm)?;
            let out = t * rho.matrix() * t.adjoint();
            let a: [f64; 8] = std::array::from_fn(|d| out[(d, d)].re);
            (a, context_b_probabilities(&rho)?)
        }
        Theory::Nchv => {
            let mut a = [0.0; 8];
            let mut b = [0.0; 4];
            for x in enumerate_assignments() {
                let w = opts.ensemble.weight(&x);
                a[assignment_to_detector(&x).index()] += w;
                b[assignment_to_joint(&x).index()] += w;
            }
            (a, b)
        }
    };

    let layer_a = DetectionLayer::new(imp.efficiency.to_vec(), imp.dark_count_prob);
    let layer_b = DetectionLayer::new(vec![imp.context_b_efficiency(); 4], imp.dark_count_prob);
    let (rec_a, _) = layer_a.recorded_distribution(&arrival_a);
    let (rec_b, _) = layer_b.recorded_distribution(&arrival_b);
    let recorded_a: [f64; 8] = std::array::from_fn(|k| rec_a[k]);
    let recorded_b: [f64; 4] = std::array::from_fn(|k| rec_b[k]);

    let (den_a, den_b) =
        if opts.fair_sampling { (recorded_a.iter().sum::<f64>(), recorded_b.iter().sum::<f64>()) } else { (1.0, 1.0) };
    let avg_product = DetectorId::ALL
        .iter()
        .map(|&d| recorded_a[d.index()] * f64::from(detector_values(d).product.value()))
        .sum::<f64>()
        / den_a;
    let avg_z1z2 =
        JointOutcome::ALL.iter().map(|o| recorded_b[o.index()] * f64::from(o.first.value())).sum::<f64>() / den_b;
    let avg_x1x2 =
        JointOutcome::ALL.iter().map(|o| recorded_b[o.index()] * f64::from(o.second.value())).sum::<f64>() / den_b;
    let lhs = (1.0 + avg_z1z2 + avg_x1x2 - avg_product).abs();

    Ok(AnalyticPrediction {
        avg_z1z2,
        avg_x1x2,
        avg_product,
        lhs,
        arrival_a,
        arrival_b,
        recorded_a,
        recorded_b,
        fair_sampling: opts.fair_sampling,
    })
}
