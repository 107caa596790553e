#![allow(clippy::needless_range_loop)]

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

use qfi_core::linalg::{eigensystem, StateVector};
use qfi_core::models::{build, Model, ModelSpec};
use qfi_core::oracle::{perturbative_transition_probs, qfi_ground, qfim_ground, tfim_qfi_analytic};
use qfi_core::Error;

fn model(spec: ModelSpec) -> Model {
    build(&spec).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// For a spin-½ ground state along `−n̂`, the QFIM is `∂_μn̂ · ∂_νn̂`.
/// With `s = x + y`, `p = x·y` this gives `F_xx = 1 + y² sin²s`,
/// `F_yy = 1 + x² sin²s` and `F_xy = 1 + x·y sin²s`.
fn two_param_bloch_qfim(x: f64, y: f64) -> [[f64; 2]; 2] {
    let s2 = (x + y).sin().powi(2);
    [
        [1.0 + y * y * s2, 1.0 + x * y * s2],
        [1.0 + x * y * s2, 1.0 + x * x * s2],
    ]
}

/// `4(⟨∂ψ|∂ψ⟩ − |⟨ψ|∂ψ⟩|²)` with `∂ψ` from central differences of
/// phase-fixed ground states.
fn qfi_by_state_differences(m: &Model, params: &[f64], which: usize) -> f64 {
    let ground = |p: &[f64]| -> DVector<C64> {
        eigensystem(&m.hamiltonian(p).unwrap())
            .unwrap()
            .ground_state()
            .into_amplitudes()
    };
    let h = 1e-4;
    let mut plus = params.to_vec();
    let mut minus = params.to_vec();
    plus[which] += h;
    minus[which] -= h;
    let psi = ground(params);
    let d = (ground(&plus) - ground(&minus)) / C64::new(2.0 * h, 0.0);
    4.0 * (d.dotc(&d).re - psi.dotc(&d).norm_sqr())
}

#[test]
fn two_level_equator_has_unit_qfi() {
    let m = model(ModelSpec::new("two-level"));
    assert!((qfi_ground(&m, &[FRAC_PI_2, 0.0], 0).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn parameter_absent_from_hamiltonian_has_zero_qfi() {
    let m = model(ModelSpec::new("two-level"));
    assert_eq!(qfi_ground(&m, &[0.0, 0.3], 1).unwrap(), 0.0);
}

#[test]
fn two_level_off_diagonal_vanishes() {
    let m = model(ModelSpec::new("two-level"));
    let f = qfim_ground(&m, &[FRAC_PI_3, 0.0], &[0, 1]).unwrap();
    assert!(f.get(0, 1).abs() < 1e-12);
    let single = qfim_ground(&m, &[FRAC_PI_3, 0.0], &[0]).unwrap();
    assert_eq!(single.len(), 1);
    assert!((single.get(0, 0) - qfi_ground(&m, &[FRAC_PI_3, 0.0], 0).unwrap()).abs() < 1e-15);
}

#[test]
fn two_param_golden_qfim() {
    let m = model(ModelSpec::new("two-param"));
    let (x, y) = (PI / 4.0 + FRAC_PI_2, FRAC_PI_2);
    let f = qfim_ground(&m, &[x, y], &[0, 1]).unwrap();
    let expected = two_param_bloch_qfim(x, y);
    for a in 0..2 {
        for b in 0..2 {
            assert!(
                rel(f.get(a, b), expected[a][b]) < 1e-8,
                "F[{a}][{b}] = {}",
                f.get(a, b)
            );
        }
    }
    // 1 + π²/8, 1 + 9π²/32, 1 + 3π²/16.
    assert!((f.get(0, 0) - 2.233_700_550_136_17).abs() < 1e-8);
    assert!((f.get(1, 1) - 3.775826237806383).abs() < 1e-8);
    assert!((f.get(0, 1) - 2.850550822813253).abs() < 1e-8);
}

#[test]
fn two_param_qfi_is_field_independent() {
    for b in [0.5, 1.0, 5.0] {
        let m = model(ModelSpec::new("two-param").with("b", b));
        let f = qfim_ground(&m, &[1.1, 0.4], &[0, 1]).unwrap();
        let expected = two_param_bloch_qfim(1.1, 0.4);
        assert!(rel(f.get(0, 1), expected[0][1]) < 1e-8);
    }
}

#[test]
fn two_level_qfi_is_field_independent() {
    let reference = qfi_ground(&model(ModelSpec::new("two-level")), &[0.9, 0.2], 0).unwrap();
    for b in [0.5, 1.0, 5.0] {
        let f = qfi_ground(
            &model(ModelSpec::new("two-level").with("b", b)),
            &[0.9, 0.2],
            0,
        )
        .unwrap();
        assert!(rel(f, reference) < 1e-10);
    }
}

#[test]
fn tfim_closed_form_matches_exact_diagonalization() {
    for n in [2usize, 4, 8] {
        let m = model(ModelSpec::new("tfim").with("n", n as f64).with("j", 10.0));
        for b in [6.0, 8.0, 10.0, 12.0] {
            let exact = qfi_ground(&m, &[b], 0).unwrap();
            let closed = tfim_qfi_analytic(10.0, b, n).unwrap();
            assert!(
                rel(closed, exact) < 1e-6,
                "N={n} B={b}: {closed} vs {exact}"
            );
        }
    }
}

#[test]
fn tfim_closed_form_limits() {
    assert_eq!(tfim_qfi_analytic(0.0, 3.0, 4).unwrap(), 0.0);
    let far = tfim_qfi_analytic(10.0, 1e4, 8).unwrap();
    assert!(far < 1e-12 && far > 0.0);
    assert!(tfim_qfi_analytic(10.0, 10.0, 3).is_err());
}

#[test]
fn crossing_point_is_degenerate() {
    let m = model(ModelSpec::new("heisenberg").with("n", 4.0).with("j", -0.25));
    assert!(matches!(
        qfi_ground(&m, &[0.3], 0),
        Err(Error::DegenerateGroundState { .. })
    ));
}

#[test]
fn predictor_examples() {
    let m = model(ModelSpec::new("two-level"));
    let p = perturbative_transition_probs(&m, &[0.7, 0.0], 0, 0.0).unwrap();
    assert!(p.iter().all(|&x| x == 0.0));
    let p = perturbative_transition_probs(&m, &[0.7, 0.0], 0, 0.1).unwrap();
    assert_eq!(p.len(), 1);
    assert!((p[0] - 6.25e-4).abs() < 1e-15, "{}", p[0]);
}

#[test]
fn state_difference_cross_check() {
    let cases: Vec<(Model, Vec<f64>)> = vec![
        (model(ModelSpec::new("two-level")), vec![0.6, 0.3]),
        (
            model(ModelSpec::new("two-level").with("b", 3.0)),
            vec![2.2, -1.0],
        ),
        (model(ModelSpec::new("two-param")), vec![0.7, 0.2]),
        (model(ModelSpec::new("two-param")), vec![2.356, 1.571]),
    ];
    for (m, p) in cases {
        for w in 0..2 {
            let spectral = qfi_ground(&m, &p, w).unwrap();
            let fd = qfi_by_state_differences(&m, &p, w);
            assert!(
                rel(fd, spectral) < 1e-5,
                "{} {p:?} [{w}]: {fd} vs {spectral}",
                m.name()
            );
        }
    }
}

fn random_model() -> impl Strategy<Value = (Model, Vec<f64>)> {
    prop_oneof![
        (0.1..5.0_f64, 0.05..PI - 0.05, -PI..PI)
            .prop_map(|(b, t, p)| (model(ModelSpec::new("two-level").with("b", b)), vec![t, p])),
        (0.05..3.0_f64, 0.05..3.0_f64)
            .prop_map(|(x, y)| (model(ModelSpec::new("two-param")), vec![x, y])),
        (0.05..PI - 0.05, -PI..PI).prop_map(|(t, p)| (model(ModelSpec::new("nv")), vec![t, p])),
        (2usize..=4, 7.0..25.0_f64).prop_map(|(h, b)| (
            model(ModelSpec::new("tfim").with("n", 2.0 * h as f64)),
            vec![b]
        )),
        (-0.2..-0.05_f64, 0.0..PI).prop_map(|(j, t)| (
            model(ModelSpec::new("heisenberg").with("n", 4.0).with("j", j)),
            vec![t]
        )),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn qfi_is_gauge_invariant((m, p) in random_model(), c in -50.0..50.0_f64) {
        let shifted = m.shifted(c);
        for w in 0..m.n_params() {
            let a = qfi_ground(&m, &p, w).unwrap();
            let b = qfi_ground(&shifted, &p, w).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-300) || (a - b).abs() < 1e-14, "{a} vs {b}");
        }
    }

    #[test]
    fn qfim_is_symmetric_psd_and_consistent((m, p) in random_model()) {
        let which: Vec<usize> = (0..m.n_params()).collect();
        let f = qfim_ground(&m, &p, &which).unwrap();
        let trace = f.trace();
        prop_assert!(f.max_asymmetry() <= 1e-9);
        prop_assert!(f.min_eigenvalue() >= -1e-9 * trace.max(1e-300));
        for a in &which {
            let diag = qfi_ground(&m, &p, *a).unwrap();
            prop_assert!((f.get(*a, *a) - diag).abs() <= 1e-12 * diag.abs().max(1e-300));
            prop_assert!(diag >= 0.0);
            for b in &which {
                prop_assert!(f.get(*a, *b).powi(2) <= f.get(*a, *a) * f.get(*b, *b) * (1.0 + 1e-9) + 1e-300);
            }
        }
    }

    #[test]
    fn predictor_identity((m, p) in random_model(), rate in 0.0..2.0_f64) {
        let spectrum = eigensystem(&m.hamiltonian(&p).unwrap()).unwrap();
        let e0 = spectrum.ground_energy();
        for w in 0..m.n_params() {
            let probs = perturbative_transition_probs(&m, &p, w, rate).unwrap();
            let lhs: f64 = probs
                .iter()
                .enumerate()
                .map(|(k, pk)| (spectrum.energy(k + 1) - e0).powi(2) * pk)
                .sum();
            let rhs = rate * rate * qfi_ground(&m, &p, w).unwrap() / 4.0;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300) || (lhs - rhs).abs() < 1e-18, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn two_param_oracle_matches_bloch_form(x in 0.05..3.0_f64, y in 0.05..3.0_f64) {
        let m = model(ModelSpec::new("two-param"));
        let f = qfim_ground(&m, &[x, y], &[0, 1]).unwrap();
        let e = two_param_bloch_qfim(x, y);
        for a in 0..2 {
            for b in 0..2 {
                prop_assert!(rel(f.get(a, b), e[a][b]) < 1e-7);
            }
        }
    }
}

#[test]
fn ground_state_of_initial_two_level_hamiltonian() {
    let m = model(ModelSpec::new("two-level"));
    let phi = eigensystem(&m.hamiltonian(&[0.0, 0.0]).unwrap())
        .unwrap()
        .ground_state();
    let down = StateVector::basis(2, 1).unwrap();
    assert!((phi.overlap(&down).unwrap() - 1.0).abs() < 1e-15);
}
