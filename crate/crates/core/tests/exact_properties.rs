use std::collections::BTreeSet;

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use photonctx_core::hilbert::{
    apply, expectation, polarization_basis_change, Frame, PathFrame, PolFrame, PolLabel, EXACT_TOL,
};
use photonctx_core::nchv::{assignment_to_detector, c_value, check_constraints, enumerate_assignments};
use photonctx_core::observables::{detector_values, observable, ObservableName};
use photonctx_core::optics::{
    build_fig1_network, build_fig1_network_with, entry_operator, polarizing_bs, propagate, splitter_matrix, Fig1Params,
};
use photonctx_core::{Complex, DetectorId, PhotonState};

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed)
}

fn random_frame(k: usize) -> Frame {
    let path = if k.is_multiple_of(2) { PathFrame::Source } else { PathFrame::Arm };
    let pol = if k.is_multiple_of(3) { PolFrame::Diagonal } else { PolFrame::Rectilinear };
    Frame { path, pol }
}

#[test]
fn elements_preserve_norm_on_random_states() {
    let mut rng = rng();
    let entry = entry_operator();
    let pbs = [PolLabel::H, PolLabel::V, PolLabel::P, PolLabel::M];
    for k in 0..1000 {
        let s = PhotonState::random(&mut rng, Frame::SOURCE);
        let out = apply(&entry, &s).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < EXACT_TOL);

        let t = (k as f64) / 1000.0;
        let m = splitter_matrix(t);
        let u = [s.amp(0), s.amp(1)];
        let d = [s.amp(2), s.amp(3)];
        let total: f64 =
            (0..2).map(|row| (0..2).map(|p| (m[(row, 0)] * u[p] + m[(row, 1)] * d[p]).norm_sqr()).sum::<f64>()).sum();
        assert!((total - 1.0).abs() < EXACT_TOL);

        let (tr, rf) = polarizing_bs(pbs[k % 4], Complex::ONE, u);
        let kept: f64 = tr.iter().chain(&rf).map(|a| a.norm_sqr()).sum();
        let before: f64 = u.iter().map(|a| a.norm_sqr()).sum();
        assert!((kept - before).abs() < EXACT_TOL);

        let r = PhotonState::random(&mut rng, random_frame(k));
        let target = match r.frame().pol {
            PolFrame::Rectilinear => PolFrame::Diagonal,
            PolFrame::Diagonal => PolFrame::Rectilinear,
        };
        let changed = polarization_basis_change(&r, target).unwrap();
        assert!((changed.norm_sqr() - 1.0).abs() < EXACT_TOL);
        let back = polarization_basis_change(&changed, r.frame().pol).unwrap();
        assert!(back.distance(&r) < EXACT_TOL);
    }
}

#[test]
fn network_conserves_probability_on_random_inputs() {
    let mut rng = rng();
    let net = build_fig1_network();
    for k in 0..1000 {
        let s = PhotonState::random(&mut rng, random_frame(k));
        let total = propagate(&net, &s).unwrap().total();
        assert!((total - 1.0).abs() < EXACT_TOL, "{k}: {total}");
    }
}

#[test]
fn transfer_matrix_is_an_isometry() {
    for path in [PathFrame::Source, PathFrame::Arm] {
        let t = build_fig1_network().transfer_matrix(path).unwrap();
        let g = t.adjoint() * t;
        assert!((g - Matrix4::<Complex>::identity()).norm() < EXACT_TOL);
    }
}

#[test]
fn equal_phase_on_a_splitter_inputs_is_a_gauge() {
    let mut rng = rng();
    let plain = build_fig1_network();
    for (k, phi) in [0.3, 1.7, -2.5, std::f64::consts::PI].into_iter().enumerate() {
        // arms 0 and 1 feed S1, arms 2 and 3 feed S2
        let arm_phases = if k % 2 == 0 { [phi, phi, 0.0, 0.0] } else { [0.0, 0.0, phi, phi] };
        let shifted = build_fig1_network_with(&Fig1Params { arm_phases, ..Default::default() });
        for _ in 0..50 {
            let s = PhotonState::random(&mut rng, Frame::SOURCE);
            let a = propagate(&plain, &s).unwrap().probabilities();
            let b = propagate(&shifted, &s).unwrap().probabilities();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < EXACT_TOL);
            }
        }
    }
}

#[test]
fn unequal_phase_is_observable() {
    let shifted = build_fig1_network_with(&Fig1Params { arm_phases: [0.0, 1.0, 0.0, 0.0], ..Default::default() });
    let p = propagate(&shifted, &PhotonState::psi0()).unwrap().probabilities();
    assert!(p[1] > 1e-3, "{p:?}");
}

fn eigenvalues(m: &Matrix4<Complex>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(*m).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn observables_are_balanced_involutions() {
    use ObservableName::*;
    for name in [Z1, X1, Z2, X2, Z1Z2, X1X2, Z1X2, X1Z2, Z1X2X1Z2] {
        let o = observable(name);
        assert!(o.is_hermitian(), "{name}");
        let sq = o.entries() * o.entries();
        assert!((sq - Matrix4::<Complex>::identity()).norm() < EXACT_TOL, "{name}");
        let e = eigenvalues(o.entries());
        let want = [-1.0, -1.0, 1.0, 1.0];
        assert!(e.iter().zip(want).all(|(a, b)| (a - b).abs() < EXACT_TOL), "{name}: {e:?}");
    }
}

#[test]
fn diagonal_change_is_an_involution() {
    let c = photonctx_core::hilbert::diagonal_change_matrix();
    assert!((c * c - Matrix2::<Complex>::identity()).norm() < EXACT_TOL);
}

/// Born-rule expectations read off the detector distribution agree with the
/// matrix expectations in the pre-splitter frame.
#[test]
fn detector_statistics_reproduce_matrix_expectations() {
    let mut rng = rng();
    let net = build_fig1_network();
    let entry = entry_operator();
    for k in 0..100 {
        let s = PhotonState::random(&mut rng, if k % 2 == 0 { Frame::SOURCE } else { Frame::CANONICAL });
        let arm = if k % 2 == 0 { apply(&entry, &s).unwrap() } else { s.clone() };
        let p = propagate(&net, &s).unwrap().probabilities();
        let from_counts = |f: &dyn Fn(DetectorId) -> i32| -> f64 {
            DetectorId::ALL.iter().map(|&d| p[d.index()] * f64::from(f(d))).sum()
        };
        let zx = from_counts(&|d| detector_values(d).z1x2.value());
        let xz = from_counts(&|d| detector_values(d).x1z2.value());
        let prod = from_counts(&|d| detector_values(d).product.value());
        let direct = |n| expectation(&observable(n), &arm).unwrap();
        assert!((zx - direct(ObservableName::Z1X2)).abs() < EXACT_TOL);
        assert!((xz - direct(ObservableName::X1Z2)).abs() < EXACT_TOL);
        assert!((prod - direct(ObservableName::Z1X2X1Z2)).abs() < EXACT_TOL);
    }
}

#[test]
fn theory_supports_partition_the_detectors() {
    let p = propagate(&build_fig1_network(), &PhotonState::psi0()).unwrap().probabilities();
    let qm: BTreeSet<DetectorId> = DetectorId::ALL.into_iter().filter(|d| p[d.index()] > 0.1).collect();
    let nchv: BTreeSet<DetectorId> = enumerate_assignments()
        .iter()
        .filter(|a| {
            let c = check_constraints(a);
            c.zz && c.xx
        })
        .map(assignment_to_detector)
        .collect();
    assert!(qm.is_disjoint(&nchv));
    assert_eq!(qm.len() + nchv.len(), 8);
    assert!(qm.iter().all(|&d| detector_values(d).product.value() == -1));
    assert!(nchv.iter().all(|&d| detector_values(d).product.value() == 1));
}

#[test]
fn constrained_members_saturate_the_bound() {
    for a in enumerate_assignments() {
        let c = check_constraints(&a);
        assert_eq!(c_value(&a).abs(), 2);
        if c.zz && c.xx {
            assert!(!c.anti);
            assert_eq!(c_value(&a), 2);
        }
    }
}

proptest! {
    #[test]
    fn any_phases_and_transmittances_conserve_probability(
        phases in prop::array::uniform4(-10.0f64..10.0),
        t1 in 0.0f64..=1.0,
        t2 in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let net = build_fig1_network_with(&Fig1Params { arm_phases: phases, transmittance: [t1, t2], ..Default::default() });
        let s = PhotonState::random(&mut ChaCha8Rng::seed_from_u64(seed), Frame::SOURCE);
        let total = propagate(&net, &s).unwrap().total();
        prop_assert!((total - 1.0).abs() < EXACT_TOL);
    }

    #[test]
    fn global_phase_is_unobservable(theta in -6.3f64..6.3, seed in any::<u64>()) {
        let s = PhotonState::random(&mut ChaCha8Rng::seed_from_u64(seed), Frame::CANONICAL);
        let g = Complex::from_polar(1.0, theta);
        let t = PhotonState::new(s.amps().map(|a| a * g), s.frame()).unwrap();
        prop_assert!(s.equal_up_to_phase(&t, 1e-12));
        let net = build_fig1_network();
        let (a, b) = (propagate(&net, &s).unwrap().probabilities(), propagate(&net, &t).unwrap().probabilities());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < EXACT_TOL);
        }
    }
}
