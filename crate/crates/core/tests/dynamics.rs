use std::f64::consts::FRAC_PI_2;

use qfi_core::linalg::{eigensystem, StateVector};
use qfi_core::models::{build, Model, ModelSpec};
use qfi_core::propagator::{
    evolve, evolve_schedule, EvolutionConfig, Frozen, QuadraticRamp, StepRule,
};
use qfi_core::Error;

fn model(spec: ModelSpec) -> Model {
    build(&spec).unwrap()
}

fn ground(m: &Model, params: &[f64]) -> StateVector {
    eigensystem(&m.hamiltonian(params).unwrap())
        .unwrap()
        .ground_state()
}

fn excited_population(m: &Model, params: &[f64], psi: &StateVector) -> f64 {
    let p = ground(m, params).overlap(psi).unwrap();
    1.0 - p * p
}

/// Gapped model, start point, driven index and excursion.
fn gapped_cases() -> Vec<(Model, Vec<f64>, usize, f64)> {
    vec![
        (
            model(ModelSpec::new("two-level")),
            vec![0.0, 0.0],
            0,
            FRAC_PI_2,
        ),
        (model(ModelSpec::new("nv")), vec![0.4, 0.0], 0, 0.5),
        (
            model(ModelSpec::new("tfim").with("n", 4.0)),
            vec![14.0],
            0,
            -2.0,
        ),
        (
            model(ModelSpec::new("heisenberg").with("n", 4.0).with("j", -0.1)),
            vec![0.2],
            0,
            1.0,
        ),
    ]
}

#[test]
fn frozen_ground_state_is_stationary() {
    for (m, p, _, _) in gapped_cases() {
        let phi = ground(&m, &p);
        let r = evolve_schedule(
            &m,
            &p,
            &Frozen { duration: 7.3 },
            &phi,
            &EvolutionConfig::default(),
            None,
        )
        .unwrap();
        assert!(
            (r.final_state.overlap(&phi).unwrap() - 1.0).abs() < 1e-9,
            "{}",
            m.name()
        );
    }
}

#[test]
fn slow_two_level_ramp_stays_adiabatic() {
    let m = model(ModelSpec::new("two-level"));
    let psi0 = StateVector::basis(2, 1).unwrap();
    let ramp = QuadraticRamp::new(0, 0.0, FRAC_PI_2, 0.05).unwrap();
    let coarse = evolve(&m, &[0.0, 0.0], &[ramp], &psi0, &EvolutionConfig::default()).unwrap();
    let fine_config = EvolutionConfig {
        steps: StepRule::Fixed(2 * coarse.steps),
        ..EvolutionConfig::default()
    };
    let fine = evolve(&m, &[0.0, 0.0], &[ramp], &psi0, &fine_config).unwrap();
    let final_params = [FRAC_PI_2, 0.0];
    let pc = 1.0 - excited_population(&m, &final_params, &coarse.final_state);
    let pf = 1.0 - excited_population(&m, &final_params, &fine.final_state);
    assert!(pc >= 0.999, "{pc}");
    assert!((pc - pf).abs() < 1e-6);
    assert!((fine.final_params[0] - FRAC_PI_2).abs() < 1e-15);
    assert!((fine.final_rates[0] - 0.05).abs() < 1e-15);
}

#[test]
fn step_doubling_and_norm() {
    for (m, p, w, delta) in gapped_cases() {
        let config = EvolutionConfig {
            check_convergence: true,
            ..EvolutionConfig::default()
        };
        let psi0 = ground(&m, &p);
        let ramp = QuadraticRamp::new(w, p[w], delta, 0.1 * delta.abs()).unwrap();
        let r = evolve(&m, &p, &[ramp], &psi0, &config).unwrap();
        let check = r.step_check.unwrap();
        assert!(
            check.rel_change < 1e-3,
            "{}: {}",
            m.name(),
            check.rel_change
        );
        assert!(r.norm_drift <= 1e-9);
    }
}

#[test]
fn krylov_and_dense_steppers_agree() {
    let m = model(ModelSpec::new("tfim").with("n", 6.0));
    let psi0 = ground(&m, &[5.0]);
    let ramp = QuadraticRamp::new(0, 5.0, 1.0, 2.0).unwrap();
    let run = |stepper: &str| {
        let config = EvolutionConfig {
            stepper: stepper.into(),
            ..EvolutionConfig::default()
        };
        evolve(&m, &[5.0], &[ramp], &psi0, &config).unwrap()
    };
    let a = run("eigen");
    let b = run("krylov");
    assert_eq!((a.stepper, b.stepper), ("eigen", "krylov"));
    let diff = (a.final_state.amplitudes() - b.final_state.amplitudes()).norm();
    assert!(diff < 1e-9, "{diff}");
    assert!(a.norm_drift <= 1e-9 && b.norm_drift <= 1e-9);
}

#[test]
fn unknown_stepper_rejected() {
    let m = model(ModelSpec::new("two-level"));
    let config = EvolutionConfig {
        stepper: "rk4".into(),
        ..EvolutionConfig::default()
    };
    let ramp = QuadraticRamp::new(0, 0.0, 1.0, 1.0).unwrap();
    let r = evolve(
        &m,
        &[0.0, 0.0],
        &[ramp],
        &StateVector::basis(2, 1).unwrap(),
        &config,
    );
    assert!(matches!(r, Err(Error::Unknown { .. })));
}

#[test]
fn synchronized_ramps_keep_their_offset() {
    let m = model(ModelSpec::new("two-param"));
    let (c, d) = (0.3, 1.1);
    let ramps = [
        QuadraticRamp::new(0, c, 0.8, 0.2).unwrap(),
        QuadraticRamp::new(1, d, 0.8, 0.2).unwrap(),
    ];
    let config = EvolutionConfig {
        record_trajectory: true,
        trajectory_samples: 50,
        ..EvolutionConfig::default()
    };
    let r = evolve(&m, &[c, d], &ramps, &ground(&m, &[c, d]), &config).unwrap();
    let traj = r.trajectory.unwrap();
    assert!(traj.points.len() >= 50);
    assert_eq!(traj.param_names, vec!["x", "y"]);
    for pt in &traj.points {
        assert!(
            ((pt.params[0] - pt.params[1]) - (c - d)).abs() < 1e-15,
            "t = {}",
            pt.t
        );
    }
    assert_eq!(traj.points.first().unwrap().t, 0.0);
    assert!((traj.points.last().unwrap().t - ramps[0].t_final()).abs() < 1e-9);
}

#[test]
fn mismatched_ramp_times_rejected() {
    let m = model(ModelSpec::new("two-param"));
    let ramps = [
        QuadraticRamp::new(0, 0.0, 0.8, 0.2).unwrap(),
        QuadraticRamp::new(1, 0.0, 0.8, 0.3).unwrap(),
    ];
    assert!(evolve(
        &m,
        &[0.0, 0.0],
        &ramps,
        &ground(&m, &[0.0, 0.0]),
        &EvolutionConfig::default()
    )
    .is_err());
}

#[test]
fn excitation_vanishes_with_velocity() {
    for (m, p, w, delta) in gapped_cases() {
        let psi0 = ground(&m, &p);
        let mut target = p.clone();
        target[w] += delta;
        let pops: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&v| {
                let ramp = QuadraticRamp::new(w, p[w], delta, v).unwrap();
                let r = evolve(&m, &p, &[ramp], &psi0, &EvolutionConfig::default()).unwrap();
                excited_population(&m, &target, &r.final_state)
            })
            .collect();
        assert!(
            pops[0] > pops[1] && pops[1] > pops[2],
            "{}: {pops:?}",
            m.name()
        );
        assert!(pops[2] < 1e-3, "{}: {pops:?}", m.name());
    }
}

#[test]
fn trajectory_csv_layout() {
    let m = model(ModelSpec::new("two-level"));
    let config = EvolutionConfig {
        record_trajectory: true,
        trajectory_samples: 4,
        ..EvolutionConfig::default()
    };
    let ramp = QuadraticRamp::new(0, 0.0, FRAC_PI_2, 0.5).unwrap();
    let r = evolve(
        &m,
        &[0.0, 0.0],
        &[ramp],
        &StateVector::basis(2, 1).unwrap(),
        &config,
    )
    .unwrap();
    let mut out = Vec::new();
    r.trajectory.unwrap().write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,theta,phi,p0,p1"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 5);
    assert_eq!(first[0], "0.00000000000e+00");
    assert!(!text.contains('\r'));
}
