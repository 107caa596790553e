use std::f64::consts::{FRAC_PI_4, PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

use qfi_core::linalg::{eigenvalues, HermitianOperator, Pauli, PauliString};
use qfi_core::models::{build, Model, ModelSpec};

fn model(spec: ModelSpec) -> Model {
    build(&spec).unwrap()
}

fn zoo() -> Vec<Model> {
    vec![
        model(ModelSpec::new("two-level").with("b", 1.3)),
        model(ModelSpec::new("two-param")),
        model(ModelSpec::new("nv")),
        model(ModelSpec::new("tfim").with("n", 4.0)),
        model(ModelSpec::new("heisenberg").with("n", 4.0)),
    ]
}

fn is_hermitian(h: &HermitianOperator) -> bool {
    let m = h.matrix();
    (m - m.adjoint()).iter().all(|z| z.norm() <= 1e-12)
}

fn commutes(a: &HermitianOperator, b: &DMatrix<C64>) -> bool {
    (a.matrix() * b - b * a.matrix()).norm() < 1e-10
}

fn parity(n: usize) -> DMatrix<C64> {
    let ops: Vec<_> = (0..n).map(|i| (i, Pauli::Z)).collect();
    PauliString::new(n, &ops).unwrap().to_dense().into_matrix()
}

/// Permutation moving every site's state one place around the ring.
fn cyclic_shift(n: usize) -> DMatrix<C64> {
    let dim = 1usize << n;
    let mut p = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        let rotated = ((b << 1) | (b >> (n - 1))) & (dim - 1);
        p[(rotated, b)] = C64::new(1.0, 0.0);
    }
    p
}

fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

fn sigma(p: Pauli) -> DMatrix<C64> {
    let (o, i, z) = (C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0));
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// The NV Hamiltonian assembled term by term from 2×2 blocks.
fn nv_by_hand(theta: f64, phi: f64, drive: Pauli) -> DMatrix<C64> {
    let (a_x, a_z) = (TAU * 2.79, TAU * 11.832);
    let (omega, larmor) = (TAU * 2.13, TAU * 1.07 * 0.74932);
    let c = |x: f64| C64::new(x, 0.0);
    let id = sigma(Pauli::I);
    let electron = (sigma(Pauli::Z) * c(theta.cos())
        + sigma(drive) * c(theta.sin() * phi.cos())
        + sigma(Pauli::Y) * c(theta.sin() * phi.sin()))
        * c(omega / 2.0);
    kron(&electron, &id) + kron(&id, &sigma(Pauli::Z)) * c(larmor / 2.0 - a_z / 4.0)
        - kron(&id, &sigma(Pauli::X)) * c(a_x / 4.0)
        - kron(&sigma(Pauli::Z), &sigma(Pauli::Z)) * c(a_z / 4.0)
        - kron(&sigma(Pauli::Z), &sigma(Pauli::X)) * c(a_x / 4.0)
}

fn lowest(m: DMatrix<C64>) -> f64 {
    eigenvalues(&HermitianOperator::new(m).unwrap()).unwrap()[0]
}

#[test]
fn two_level_at_the_pole_is_sigma_z() {
    let h = model(ModelSpec::new("two-level"))
        .hamiltonian(&[0.0, 0.0])
        .unwrap();
    assert!((h.matrix() - sigma(Pauli::Z)).norm() < 1e-15);
}

#[test]
fn two_site_tfim_assembly() {
    let h = model(ModelSpec::new("tfim").with("n", 2.0))
        .hamiltonian(&[5.0])
        .unwrap();
    let xx = kron(&sigma(Pauli::X), &sigma(Pauli::X));
    let z1 = kron(&sigma(Pauli::Z), &sigma(Pauli::I));
    let z2 = kron(&sigma(Pauli::I), &sigma(Pauli::Z));
    let expected = (&xx + &xx) * C64::new(-10.0, 0.0) - (z1 + z2) * C64::new(5.0, 0.0);
    assert!((h.matrix() - expected).norm() < 1e-12);
}

#[test]
fn tfim_field_derivative() {
    let m = model(ModelSpec::new("tfim").with("n", 2.0));
    let d = m.d_hamiltonian(&[3.0], 0).unwrap();
    let z1 = kron(&sigma(Pauli::Z), &sigma(Pauli::I));
    let z2 = kron(&sigma(Pauli::I), &sigma(Pauli::Z));
    assert!((d.matrix() + z1 + z2).norm() < 1e-15);
}

#[test]
fn two_level_theta_derivative() {
    let b = 1.7;
    let m = model(ModelSpec::new("two-level").with("b", b));
    for theta in [0.0, 0.4, 2.0] {
        let d = m.d_hamiltonian(&[theta, 0.0], 0).unwrap();
        let expected = (sigma(Pauli::X) * C64::new(theta.cos(), 0.0)
            - sigma(Pauli::Z) * C64::new(theta.sin(), 0.0))
            * C64::new(b, 0.0);
        assert!((d.matrix() - expected).norm() < 1e-14);
    }
}

#[test]
fn nv_golden_ground_energy() {
    let m = model(ModelSpec::new("nv"));
    let e0 = eigenvalues(&m.hamiltonian(&[FRAC_PI_4, 0.0]).unwrap()).unwrap()[0];
    let by_hand = lowest(nv_by_hand(FRAC_PI_4, 0.0, Pauli::X));
    assert!((e0 - by_hand).abs() < 1e-12, "{e0} vs {by_hand}");
    assert!((e0 - -31.771949011529923).abs() < 1e-9, "{e0}");
}

#[test]
fn nv_literal_drive_variant() {
    let m = model(ModelSpec::new("nv").with("drive", "z"));
    for (theta, phi) in [(FRAC_PI_4, 0.0), (1.1, 0.7)] {
        let e = eigenvalues(&m.hamiltonian(&[theta, phi]).unwrap()).unwrap();
        let by_hand =
            eigenvalues(&HermitianOperator::new(nv_by_hand(theta, phi, Pauli::Z)).unwrap())
                .unwrap();
        for (a, b) in e.iter().zip(&by_hand) {
            assert!((a - b).abs() < 1e-12);
        }
    }
    assert!(build(&ModelSpec::new("nv").with("drive", "w")).is_err());
}

#[test]
fn site_ranges_enforced() {
    assert!(build(&ModelSpec::new("tfim").with("n", 13.0)).is_err());
    assert!(build(&ModelSpec::new("tfim").with("n", 1.0)).is_err());
    assert!(build(&ModelSpec::new("heisenberg").with("n", 11.0)).is_err());
    assert!(build(&ModelSpec::new("two-level").with("b", 0.0)).is_err());
}

#[test]
fn wrong_parameter_count_rejected() {
    let m = model(ModelSpec::new("two-level"));
    assert!(m.hamiltonian(&[0.1]).is_err());
    assert!(m.d_hamiltonian(&[0.1, 0.2], 2).is_err());
}

#[test]
fn spin_chains_commute_with_their_symmetries() {
    for n in 2..=6 {
        let tfim = model(ModelSpec::new("tfim").with("n", n as f64).with("j", 1.3));
        let heis = model(
            ModelSpec::new("heisenberg")
                .with("n", n as f64)
                .with("j", -0.4),
        );
        let shift = cyclic_shift(n);
        for b in [0.3, 1.0, 4.2] {
            let h = tfim.hamiltonian(&[b]).unwrap();
            assert!(commutes(&h, &parity(n)), "tfim parity n={n}");
            assert!(commutes(&h, &shift), "tfim shift n={n}");
        }
        for theta in [0.0, 0.8, 2.5] {
            let h = heis.hamiltonian(&[theta]).unwrap();
            assert!(commutes(&h, &shift), "heisenberg shift n={n}");
            // Total spin along the field axis.
            let (s, c) = theta.sin_cos();
            let mut axis = DMatrix::<C64>::zeros(1 << n, 1 << n);
            for i in 0..n {
                axis += PauliString::new(n, &[(i, Pauli::X)])
                    .unwrap()
                    .to_dense()
                    .into_matrix()
                    * C64::new(s, 0.0)
                    + PauliString::new(n, &[(i, Pauli::Z)])
                        .unwrap()
                        .to_dense()
                        .into_matrix()
                        * C64::new(c, 0.0);
            }
            assert!(commutes(&h, &axis), "heisenberg field-axis spin n={n}");
        }
    }
}

fn param_strategy(name: &'static str) -> BoxedStrategy<Vec<f64>> {
    match name {
        "tfim" => (0.1..20.0_f64).prop_map(|b| vec![b]).boxed(),
        "heisenberg" => (0.0..PI).prop_map(|t| vec![t]).boxed(),
        "two-param" => (0.05..3.0_f64, 0.05..3.0_f64)
            .prop_map(|(x, y)| vec![x, y])
            .boxed(),
        _ => (0.05..PI - 0.05, -PI..PI)
            .prop_map(|(t, p)| vec![t, p])
            .boxed(),
    }
}

fn assert_hermitian_everywhere(m: &Model, params: &[f64]) -> Result<(), TestCaseError> {
    prop_assert!(is_hermitian(&m.hamiltonian(params).unwrap()));
    for w in 0..m.n_params() {
        prop_assert!(is_hermitian(&m.d_hamiltonian(params, w).unwrap()));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn two_level_hermitian(p in param_strategy("two-level")) {
        assert_hermitian_everywhere(&zoo()[0], &p)?;
    }

    #[test]
    fn two_param_hermitian(p in param_strategy("two-param")) {
        assert_hermitian_everywhere(&zoo()[1], &p)?;
    }

    #[test]
    fn nv_hermitian(p in param_strategy("nv")) {
        assert_hermitian_everywhere(&zoo()[2], &p)?;
    }

    #[test]
    fn tfim_hermitian(p in param_strategy("tfim")) {
        assert_hermitian_everywhere(&zoo()[3], &p)?;
    }

    #[test]
    fn heisenberg_hermitian(p in param_strategy("heisenberg")) {
        assert_hermitian_everywhere(&zoo()[4], &p)?;
    }

    #[test]
    fn two_level_spectrum_is_plus_minus_b(b in 0.1..10.0_f64, theta in -PI..PI, phi in -PI..PI) {
        let m = model(ModelSpec::new("two-level").with("b", b));
        let e = eigenvalues(&m.hamiltonian(&[theta, phi]).unwrap()).unwrap();
        prop_assert!((e[0] + b).abs() < 1e-12 * b.max(1.0));
        prop_assert!((e[1] - b).abs() < 1e-12 * b.max(1.0));
    }
}

fn static_name(m: &Model) -> &'static str {
    match m.name() {
        "tfim" => "tfim",
        "heisenberg" => "heisenberg",
        "two-param" => "two-param",
        "nv" => "nv",
        _ => "two-level",
    }
}

#[test]
fn derivatives_match_central_differences() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for m in zoo() {
        for _ in 0..20 {
            let params = param_strategy(static_name(&m))
                .new_tree(&mut runner)
                .unwrap()
                .current();
            let scale = m.hamiltonian(&params).unwrap().frobenius_norm();
            for w in 0..m.n_params() {
                let h = 1e-4 * params[w].abs().max(1.0);
                let mut plus = params.clone();
                let mut minus = params.clone();
                plus[w] += h;
                minus[w] -= h;
                let fd = (m.hamiltonian(&plus).unwrap().into_matrix()
                    - m.hamiltonian(&minus).unwrap().into_matrix())
                    / C64::new(2.0 * h, 0.0);
                let d = m.d_hamiltonian(&params, w).unwrap();
                let err = (d.matrix() - fd).norm();
                assert!(
                    err <= 1e-6 * scale,
                    "{} param {w} at {params:?}: {err}",
                    m.name()
                );
            }
        }
    }
}
